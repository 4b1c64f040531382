#ifndef ADSSM_CONFIG_HPP
#define ADSSM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace adssm::config {

// Flat key = value file; '#' starts a comment. Defaults carry the
// reference hyperparameters. Flags override file values.
class Config {
public:
    Config();  // defaults

    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);  // override

    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::uint64_t seed() const;
    bool flag(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    std::string resolved() const;  // echoed to the log

    static const std::vector<std::string>& valid_keys();

private:
    std::map<std::string, std::string> values_;
};

}  // namespace adssm::config

#endif
