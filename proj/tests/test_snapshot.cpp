#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <mnpl/snapshot.hpp>

using namespace mnpl;

namespace {

std::string bytes_of(const LatticeGeometry& g, const SpinorField<2>* p, const LatticeConnection<2>* A) {
    std::ostringstream o(std::ios::binary);
    write_snapshot(o, g, p, A);
    return o.str();
}

}  // namespace

TEST(Snapshot, HeaderLayout) {
    LatticeGeometry g(4);
    SpinorField<2> p(std::size_t(g.sites()));
    p[0].alpha[0] = cplx(1.5, -2.0);
    auto b = bytes_of(g, &p, nullptr);
    const unsigned char head[] = {'M', 'N', 'P', 'L', 1, 0, 0, 0, 4, 0, 0, 0, 2, 0, 0, 0, 1};
    ASSERT_GE(b.size(), sizeof head);
    for (std::size_t i = 0; i < sizeof head; ++i) EXPECT_EQ((unsigned char)b[i], head[i]) << i;
    // 1.5 = 0x3FF8000000000000, -2.0 = 0xC000000000000000, little-endian
    const unsigned char re[] = {0, 0, 0, 0, 0, 0, 0xF8, 0x3F};
    const unsigned char im[] = {0, 0, 0, 0, 0, 0, 0, 0xC0};
    for (int i = 0; i < 8; ++i) {
        EXPECT_EQ((unsigned char)b[17 + i], re[i]);
        EXPECT_EQ((unsigned char)b[25 + i], im[i]);
    }
    EXPECT_EQ(b.size(), 17u + std::size_t(g.sites()) * 4 * 16);
}

TEST(Snapshot, RoundTripIsBitwise) {
    LatticeGeometry g(4);
    std::mt19937_64 rng(3);
    auto p = random_spinor<2>(g, 1.0, rng);
    auto A = random_connection<2>(g, 1.0, rng);
    p[7].beta[1] = cplx(-0.0, 1e-310);  // signed zero and a subnormal survive

    auto s = bytes_of(g, &p, &A);
    EXPECT_EQ(s.size(), 17u + std::size_t(g.sites()) * (4 + 16) * 16);
    std::istringstream in(s, std::ios::binary);
    auto r = read_snapshot<2>(in);
    EXPECT_EQ(r.header.kind, SnapshotKind::configuration);
    ASSERT_TRUE(r.psi && r.A);
    EXPECT_EQ(bytes_of(g, &*r.psi, &*r.A), s);
    EXPECT_TRUE(std::signbit(r.psi->at(7).beta[1].real()));

    std::istringstream in2(bytes_of(g, nullptr, &A), std::ios::binary);
    auto c = read_snapshot<2>(in2);
    EXPECT_FALSE(c.psi);
    ASSERT_TRUE(c.A);
    for (int mu = 0; mu < 4; ++mu)
        for (int x = 0; x < g.sites(); ++x) EXPECT_EQ(c.A->a[mu][x], A.a[mu][x]);

    // dynamic rank reads the same bytes
    std::istringstream in3(s, std::ios::binary);
    auto d = read_snapshot<Dyn>(in3);
    EXPECT_EQ(d.psi->at(5).alpha, Vec<Dyn>(p[5].alpha));
}

TEST(Snapshot, RejectsMalformed) {
    LatticeGeometry g(4);
    SpinorField<2> p(std::size_t(g.sites()));
    auto good = bytes_of(g, &p, nullptr);
    auto expect_format_error = [](std::string b) {
        std::istringstream in(b, std::ios::binary);
        EXPECT_THROW(read_snapshot<2>(in), FormatError);
    };
    auto bad = good;
    bad[0] = 'X';
    expect_format_error(bad);
    bad = good;
    bad[4] = 2;  // version
    expect_format_error(bad);
    bad = good;
    bad[16] = 9;  // kind
    expect_format_error(bad);
    bad = good;
    bad[8] = 5;  // odd N
    expect_format_error(bad);
    expect_format_error(good.substr(0, good.size() - 1));
    expect_format_error(good + "x");
    expect_format_error("");

    std::istringstream in(good, std::ios::binary);
    EXPECT_THROW(read_snapshot<3>(in), InconsistentData);
}

TEST(Snapshot, FileHelpers) {
    LatticeGeometry g(4);
    std::mt19937_64 rng(1);
    auto p = random_spinor<2>(g, 1.0, rng);
    const std::string path = ::testing::TempDir() + "mnpl_snapshot_test.bin";
    save_snapshot<2>(path, g, &p, nullptr);
    auto h = peek_snapshot(path);
    EXPECT_EQ(h.N, 4u);
    EXPECT_EQ(h.n, 2u);
    EXPECT_EQ(h.kind, SnapshotKind::spinor);
    auto s = load_snapshot<2>(path);
    EXPECT_EQ(s.psi->at(9).beta, p[9].beta);
    EXPECT_THROW(load_snapshot<2>(path + ".missing"), InvalidArgument);
}
