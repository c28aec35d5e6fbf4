#ifndef PSDO_REPORT_HPP
#define PSDO_REPORT_HPP

#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace psdo {

/// Key/value record list with a pass flag. Printed either as human-readable
/// lines or as machine-readable `key=value` records.
struct Report {
    std::string title;
    bool pass = true;
    std::vector<std::pair<std::string, std::string>> kv;

    void add(const std::string& key, const std::string& value) { kv.emplace_back(key, value); }
    void add(const std::string& key, double value) {
        std::ostringstream os;
        os.precision(15);
        os << value;
        kv.emplace_back(key, os.str());
    }
    void add(const std::string& key, long long value) { kv.emplace_back(key, std::to_string(value)); }
    void add(const std::string& key, int value) { kv.emplace_back(key, std::to_string(value)); }
    void add(const std::string& key, bool value) { kv.emplace_back(key, value ? "true" : "false"); }

    void merge(const Report& other, const std::string& prefix = "") {
        pass = pass && other.pass;
        for (const auto& [k, v] : other.kv) kv.emplace_back(prefix.empty() ? k : prefix + "." + k, v);
    }

    void print_human(std::ostream& os) const {
        os << "== " << title << " : " << (pass ? "PASS" : "FAIL") << "\n";
        for (const auto& [k, v] : kv) os << "   " << k << " = " << v << "\n";
    }
    void print_records(std::ostream& os) const {
        os << "report=" << title << "\n" << "pass=" << (pass ? "true" : "false") << "\n";
        for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
    }
    std::string value_of(const std::string& key) const {
        for (const auto& [k, v] : kv)
            if (k == key) return v;
        return {};
    }
};

} // namespace psdo

#endif
