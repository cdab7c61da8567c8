#pragma once

#include "sea/io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace sea {

enum class AlignLoss : std::uint8_t { solosim = 0, infonce = 1 };
enum class DisLoss : std::uint8_t { club = 0, neg_l2 = 1 };

struct TrainConfig {
    Index d = 64;
    Index gcn_layers = 2;
    Index ii_layers = 1;
    Index knn_k = 10;
    double lr = 1e-4;
    double club_lr = 1e-3;
    Index club_inner_steps = 1;
    double alpha = 0.1;
    double beta = 0.01;
    double tau = 0.2;
    Index batch_size = 2048;
    Index max_epochs = 1000;
    Index patience = 20;
    std::uint64_t seed = 42;
    AlignLoss align_loss = AlignLoss::solosim;
    DisLoss dis_loss = DisLoss::club;
    bool include_layer0 = false;
    Index club_hidden = 0;  // 0 means d
    bool shared_user_init = false;

    void validate() const {
        if (lr < 0.0) throw std::invalid_argument("lr must be >= 0");
        if (club_lr < 0.0) throw std::invalid_argument("club_lr must be >= 0");
        if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
        if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("alpha and beta must be >= 0");
        if (d <= 0 || d % 2 != 0) throw std::invalid_argument("d must be positive and even");
        if (gcn_layers < 1) throw std::invalid_argument("gcn_layers must be >= 1");
        if (ii_layers < 0) throw std::invalid_argument("ii_layers must be >= 0");
        if (knn_k < 1) throw std::invalid_argument("knn_k must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
        if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
        if (patience < 0) throw std::invalid_argument("patience must be >= 0");
    }

    void set(const std::string& key, const std::string& value) {
        auto as_index = [&] { return static_cast<Index>(std::stoll(value)); };
        auto as_double = [&] { return std::stod(value); };
        auto as_bool = [&] {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw std::invalid_argument("expected boolean for " + key + ", got '" + value + "'");
        };
        if (key == "d") d = as_index();
        else if (key == "gcn_layers") gcn_layers = as_index();
        else if (key == "ii_layers") ii_layers = as_index();
        else if (key == "knn_k") knn_k = as_index();
        else if (key == "lr") lr = as_double();
        else if (key == "club_lr") club_lr = as_double();
        else if (key == "club_inner_steps") club_inner_steps = as_index();
        else if (key == "alpha") alpha = as_double();
        else if (key == "beta") beta = as_double();
        else if (key == "tau") tau = as_double();
        else if (key == "batch_size") batch_size = as_index();
        else if (key == "max_epochs") max_epochs = as_index();
        else if (key == "patience") patience = as_index();
        else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "align_loss") {
            if (value == "solosim") align_loss = AlignLoss::solosim;
            else if (value == "infonce") align_loss = AlignLoss::infonce;
            else throw std::invalid_argument("align_loss must be solosim or infonce");
        } else if (key == "dis_loss") {
            if (value == "club") dis_loss = DisLoss::club;
            else if (value == "neg_l2") dis_loss = DisLoss::neg_l2;
            else throw std::invalid_argument("dis_loss must be club or neg_l2");
        } else if (key == "include_layer0") include_layer0 = as_bool();
        else if (key == "club_hidden") club_hidden = as_index();
        else if (key == "shared_user_init") shared_user_init = as_bool();
        else throw std::invalid_argument("unknown config key: " + key);
    }

    // canonical flat key = value form; fixed ordering so its digest is
    // stable
    std::string serialize() const {
        std::ostringstream os;
        os.precision(17);
        os << "align_loss = " << (align_loss == AlignLoss::solosim ? "solosim" : "infonce") << '\n'
           << "alpha = " << alpha << '\n'
           << "batch_size = " << batch_size << '\n'
           << "beta = " << beta << '\n'
           << "club_hidden = " << club_hidden << '\n'
           << "club_inner_steps = " << club_inner_steps << '\n'
           << "club_lr = " << club_lr << '\n'
           << "d = " << d << '\n'
           << "dis_loss = " << (dis_loss == DisLoss::club ? "club" : "neg_l2") << '\n'
           << "gcn_layers = " << gcn_layers << '\n'
           << "ii_layers = " << ii_layers << '\n'
           << "include_layer0 = " << (include_layer0 ? "true" : "false") << '\n'
           << "knn_k = " << knn_k << '\n'
           << "lr = " << lr << '\n'
           << "max_epochs = " << max_epochs << '\n'
           << "patience = " << patience << '\n'
           << "seed = " << seed << '\n'
           << "shared_user_init = " << (shared_user_init ? "true" : "false") << '\n'
           << "tau = " << tau << '\n';
        return os.str();
    }

    std::string digest() const { return to_hex(fnv1a64(serialize())); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Flat `key = value` text (TOML-compatible subset): one pair per line,
// '#' comments, optional quotes around string values.
inline TrainConfig parse_config_text(const std::string& text, TrainConfig base = {}) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        try {
            base.set(key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

inline TrainConfig load_config(const std::string& path, TrainConfig base = {}) {
    return parse_config_text(read_file(path), base);
}

// `--set key=value` override
inline void apply_override(TrainConfig& cfg, const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override must be key=value: " + kv);
    cfg.set(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
}

}  // namespace sea
