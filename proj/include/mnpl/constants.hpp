#pragma once
// Frozen regression constants: UTF-8 text, one `name = decimal` per line.
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "types.hpp"

namespace mnpl {

class ConstantsTable {
public:
    static ConstantsTable parse(std::istream& in) {
        ConstantsTable t;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto eq = line.find('=');
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            if (trim(line).empty()) continue;
            if (eq == std::string::npos)
                throw FormatError("constants line " + std::to_string(lineno) + ": missing '='");
            std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
            std::size_t used = 0;
            try {
                (void)std::stod(val, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (key.empty() || used != val.size())
                throw FormatError("constants line " + std::to_string(lineno) + ": bad entry");
            t.values_[key] = val;
        }
        return t;
    }

    static ConstantsTable load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw FormatError("cannot open constants file " + path);
        return parse(f);
    }

    bool has(const std::string& k) const { return values_.count(k) != 0; }
    const std::string& text(const std::string& k) const {
        auto it = values_.find(k);
        if (it == values_.end()) throw FormatError("missing constant " + k);
        return it->second;
    }
    double get(const std::string& k) const { return std::stod(text(k)); }
    void set(const std::string& k, const std::string& decimal) { values_[k] = decimal; }
    const std::map<std::string, std::string>& values() const { return values_; }

    void write(std::ostream& out) const {
        for (auto& [k, v] : values_) out << k << " = " << v << "\n";
    }

private:
    std::map<std::string, std::string> values_;
};

#ifdef MNPL_CONSTANTS_PATH
inline const ConstantsTable& frozen_constants() {
    static const ConstantsTable t = ConstantsTable::load(MNPL_CONSTANTS_PATH);
    return t;
}
#endif

}  // namespace mnpl
