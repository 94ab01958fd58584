// Regenerates data/frozen_constants.txt from the estimators.
// usage: freeze_constants [out-path] [seed]
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <mnpl/constants.hpp>
#include <mnpl/estimators.hpp>

namespace {
std::string dec(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}
}  // namespace

int main(int argc, char** argv) {
    const std::string out = argc > 1 ? argv[1] : "data/frozen_constants.txt";
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240601;
    const mnpl::SearchBudget b;
    mnpl::ConstantsTable t;
    t.set("constants_version", "1");
    t.set("generator_seed", std::to_string(seed));
    t.set("budget_samples", std::to_string(b.samples));
    t.set("budget_restarts", std::to_string(b.restarts));
    t.set("properness_n1_tau1", dec(mnpl::properness_constant(1, 1.0, b, seed)));
    t.set("properness_n2_tau0", dec(mnpl::properness_constant(2, 0.0, b, seed)));
    t.set("properness_n3_tau0", dec(mnpl::properness_constant(3, 0.0, b, seed)));
    t.set("properness_n2_tau1", dec(mnpl::properness_constant(2, 1.0, b, seed)));
    t.set("identity_obstruction_n2_tau1_z1", dec(mnpl::identity_obstruction(2, 1.0, 1.0, b, seed)));
    t.set("identity_obstruction_n3_tau1_z1", dec(mnpl::identity_obstruction(3, 1.0, 1.0, b, seed)));
    std::ofstream f(out);
    if (!f) {
        std::cerr << "cannot write " << out << "\n";
        return 2;
    }
    f << "# regression constants; regenerate with freeze_constants\n";
    t.write(f);
    t.write(std::cout);
    return 0;
}
