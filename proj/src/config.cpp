#include "adssm/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adssm/types.hpp"

namespace adssm::config {

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"seed", "1"},
        {"lr", "0.0008"},
        {"batch", "128"},
        {"epochs", "5000"},
        {"anneal", "1250"},
        {"hidden", "256"},
        {"latent", "128"},
        {"attn_hidden", "128"},
        {"interval", "90"},
        {"chunk_seconds", "4"},
        {"rate", "125"},
        {"threads", "1"},
        {"grad_clip", "10"},
        {"checkpoint_every", "100"},
        {"strict_posterior", "0"},
        {"min_bpm", "40"},
        {"max_bpm", "180"},
        {"ppg_band_low", "0.5"},
        {"ppg_band_high", "8"},
        {"ecg_band_low", "0.5"},
        {"ecg_band_high", "40"},
        {"noise_std", "0.3"},
        {"noise_on_ecg", "0"},
    };
    return d;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config::Config() : values_(defaults()) {}

const std::vector<std::string>& Config::valid_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [key, _] : defaults()) k.push_back(key);
        return k;
    }();
    return keys;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) {
        std::string known;
        for (const auto& k : valid_keys()) known += (known.empty() ? "" : ", ") + k;
        throw ParseError("unknown config key '" + key + "' (valid keys: " + known +
                         ")");
    }
    values_[key] = value;
}

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": empty key or value");
        set(key, value);
    }
}

double Config::real(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw InvalidArgument("unknown config key: " + key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "' is not a number: " + it->second);
    }
}

std::int64_t Config::integer(const std::string& key) const {
    const double v = real(key);
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
        throw ParseError("config key '" + key + "' is not an integer");
    return i;
}

std::uint64_t Config::seed() const {
    return static_cast<std::uint64_t>(integer("seed"));
}

bool Config::flag(const std::string& key) const { return integer(key) != 0; }

std::string Config::resolved() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
    return out.str();
}

}  // namespace adssm::config
