#pragma once
// Binary field snapshots: "MNPL", version u32, N u32, n u32, kind u8, then complex doubles (re, im),
// everything little-endian. Spinor payload: per site alpha then beta. Connection payload: per
// direction, per site, the n x n matrix row-major. A configuration is spinor then connection.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "lattice.hpp"

namespace mnpl {

enum class SnapshotKind : std::uint8_t { spinor = 1, connection = 2, configuration = 3 };

inline constexpr std::uint32_t snapshot_version = 1;

struct SnapshotHeader {
    std::uint32_t version = snapshot_version;
    std::uint32_t N = 0, n = 0;
    SnapshotKind kind = SnapshotKind::configuration;
};

template <int R>
struct Snapshot {
    SnapshotHeader header;
    std::optional<SpinorField<R>> psi;
    std::optional<LatticeConnection<R>> A;
};

namespace detail {

inline void put_u32(std::ostream& o, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    o.write(b, 4);
}

inline void put_f64(std::ostream& o, double d) {
    auto v = std::bit_cast<std::uint64_t>(d);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    o.write(b, 8);
}

inline void put_c(std::ostream& o, cplx z) {
    put_f64(o, z.real());
    put_f64(o, z.imag());
}

inline void get_bytes(std::istream& in, unsigned char* b, int k) {
    in.read(reinterpret_cast<char*>(b), k);
    if (in.gcount() != k) throw FormatError("snapshot truncated");
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    get_bytes(in, b, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline cplx get_c(std::istream& in) {
    double re, im;
    for (double* d : {&re, &im}) {
        unsigned char b[8];
        get_bytes(in, b, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        *d = std::bit_cast<double>(v);
    }
    return {re, im};
}

template <int R>
void put_spinor(std::ostream& o, const SpinorField<R>& p) {
    for (auto& f : p) {
        for (int i = 0; i < f.rank(); ++i) put_c(o, f.alpha[i]);
        for (int i = 0; i < f.rank(); ++i) put_c(o, f.beta[i]);
    }
}

template <int R>
void put_connection(std::ostream& o, const LatticeConnection<R>& A) {
    for (auto& c : A.a)
        for (auto& m : c)
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j) put_c(o, m(i, j));
}

inline void write_header(std::ostream& o, const LatticeGeometry& g, int n, SnapshotKind k) {
    o.write("MNPL", 4);
    put_u32(o, snapshot_version);
    put_u32(o, std::uint32_t(g.N()));
    put_u32(o, std::uint32_t(n));
    const char kb = char(k);
    o.write(&kb, 1);
}

}  // namespace detail

inline SnapshotHeader read_snapshot_header(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "MNPL", 4) != 0) throw FormatError("not an MNPL snapshot");
    SnapshotHeader h;
    h.version = detail::get_u32(in);
    if (h.version != snapshot_version) throw FormatError("unsupported snapshot version " + std::to_string(h.version));
    h.N = detail::get_u32(in);
    h.n = detail::get_u32(in);
    unsigned char k;
    detail::get_bytes(in, &k, 1);
    if (k < 1 || k > 3) throw FormatError("unknown snapshot kind");
    h.kind = SnapshotKind(k);
    if (h.N < 4 || h.N % 2 || h.N > 1024 || h.n < 1 || h.n > 64) throw FormatError("snapshot dimensions out of range");
    return h;
}

template <int R>
void write_snapshot(std::ostream& o, const LatticeGeometry& g, const SpinorField<R>* psi, const LatticeConnection<R>* A) {
    require(psi || A, "nothing to write");
    int n = psi ? psi->front().rank() : int(A->a[0].front().rows());
    if (psi && A) check_shapes(g, *psi, *A);
    if (psi) require(int(psi->size()) == g.sites(), "spinor size mismatch");
    if (A)
        for (auto& c : A->a) require(int(c.size()) == g.sites(), "connection size mismatch");
    auto kind = psi && A ? SnapshotKind::configuration : psi ? SnapshotKind::spinor : SnapshotKind::connection;
    detail::write_header(o, g, n, kind);
    if (psi) detail::put_spinor(o, *psi);
    if (A) detail::put_connection(o, *A);
    if (!o) throw std::runtime_error("snapshot write failed");
}

template <int R>
Snapshot<R> read_snapshot(std::istream& in) {
    Snapshot<R> s;
    s.header = read_snapshot_header(in);
    const int n = int(s.header.n), N = int(s.header.N);
    if (R != Dyn && n != R) throw InconsistentData("snapshot rank " + std::to_string(n) + " does not match");
    LatticeGeometry g(N);
    if (s.header.kind != SnapshotKind::connection) {
        SpinorField<R> p(std::size_t(g.sites()), SpinorFiber<R>(n));
        for (auto& f : p) {
            for (int i = 0; i < n; ++i) f.alpha[i] = detail::get_c(in);
            for (int i = 0; i < n; ++i) f.beta[i] = detail::get_c(in);
        }
        s.psi = std::move(p);
    }
    if (s.header.kind != SnapshotKind::spinor) {
        LatticeConnection<R> A;
        for (auto& c : A.a) {
            c.assign(std::size_t(g.sites()), Mat<R>::Zero(n, n));
            for (auto& m : c)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) m(i, j) = detail::get_c(in);
        }
        s.A = std::move(A);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after snapshot payload");
    return s;
}

template <int R>
void save_snapshot(const std::string& path, const LatticeGeometry& g, const SpinorField<R>* psi,
                   const LatticeConnection<R>* A) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw InvalidArgument("cannot open " + path + " for writing");
    write_snapshot(o, g, psi, A);
}

template <int R>
Snapshot<R> load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    return read_snapshot<R>(in);
}

inline SnapshotHeader peek_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    return read_snapshot_header(in);
}

}  // namespace mnpl
