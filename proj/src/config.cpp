#include "eetsim/config.hpp"

#include "eetsim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace eetsim {

namespace fs = std::filesystem;

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

using Entries = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

Entries parse_key_value(const std::string& text, const std::string& origin) {
    Entries entries;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto fail = [&](const std::string& msg) {
            throw InputError(origin + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail("unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                fail("empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            fail("missing key");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (entries.count(full)) {
            fail("duplicate key '" + full + "' (first set on line " + std::to_string(entries[full].line) + ")");
        }
        entries[full] = {unquote(trim(line.substr(eq + 1))), line_no};
    }
    return entries;
}

std::string json_scalar(const nlohmann::json& value, const std::string& key, const std::string& origin) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_boolean()) {
        return value.get<bool>() ? "true" : "false";
    }
    if (value.is_number()) {
        return value.dump();
    }
    throw InputError(origin + ": " + key + ": expected a scalar");
}

void flatten_json(const nlohmann::json& node, const std::string& prefix, const std::string& origin,
                  Entries& entries) {
    for (const auto& [name, value] : node.items()) {
        const std::string key = prefix.empty() ? name : prefix + "." + name;
        if (value.is_object()) {
            flatten_json(value, key, origin, entries);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                joined += (joined.empty() ? "" : ", ") + json_scalar(item, key, origin);
            }
            entries[key] = {joined, 0};
        } else {
            entries[key] = {json_scalar(value, key, origin), 0};
        }
    }
}

Entries parse_json(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(origin + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw InputError(origin + ": top level must be an object");
    }
    Entries entries;
    flatten_json(doc, "", origin, entries);
    return entries;
}

class Reader {
public:
    Reader(const Entries& entries, std::string origin) : entries_(entries), origin_(std::move(origin)) {}

    const Entry* find(const std::string& key) {
        used_.insert(key);
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    [[noreturn]] void fail(const std::string& key, const Entry& e, const std::string& msg) const {
        const std::string where = e.line > 0 ? origin_ + ":" + std::to_string(e.line) : origin_;
        throw InputError(where + ": " + key + ": " + msg);
    }

    double number(const Entry& e, const std::string& key, const std::string& text) const {
        std::size_t pos = 0;
        double value = 0.0;
        try {
            value = std::stod(text, &pos);
        } catch (const std::exception&) {
            fail(key, e, "expected a number, got '" + text + "'");
        }
        if (pos != text.size() || !std::isfinite(value)) {
            fail(key, e, "expected a number, got '" + text + "'");
        }
        return value;
    }

    void read(const std::string& key, double& out) {
        if (const Entry* e = find(key)) {
            out = number(*e, key, e->value);
        }
    }

    void read(const std::string& key, int& out) {
        if (const Entry* e = find(key)) {
            const double v = number(*e, key, e->value);
            if (v != std::floor(v) || std::abs(v) > 1e9) {
                fail(key, *e, "expected an integer");
            }
            out = static_cast<int>(v);
        }
    }

    void read_count(const std::string& key, std::size_t& out) {
        if (const Entry* e = find(key)) {
            const double v = number(*e, key, e->value);
            if (v != std::floor(v) || v < 0 || v > 1e12) {
                fail(key, *e, "expected a non-negative integer");
            }
            out = static_cast<std::size_t>(v);
        }
    }

    void read(const std::string& key, std::uint64_t& out) {
        if (const Entry* e = find(key)) {
            try {
                std::size_t pos = 0;
                out = std::stoull(e->value, &pos);
                if (pos != e->value.size() || e->value.front() == '-') {
                    throw std::invalid_argument("trailing");
                }
            } catch (const std::exception&) {
                fail(key, *e, "expected a non-negative integer, got '" + e->value + "'");
            }
        }
    }

    void read(const std::string& key, bool& out) {
        if (const Entry* e = find(key)) {
            if (e->value == "true" || e->value == "yes" || e->value == "1") {
                out = true;
            } else if (e->value == "false" || e->value == "no" || e->value == "0") {
                out = false;
            } else {
                fail(key, *e, "expected true or false");
            }
        }
    }

    template <typename T, typename F>
    void read_list(const std::string& key, std::vector<T>& out, F&& convert) {
        if (const Entry* e = find(key)) {
            out.clear();
            for (const auto& item : split_list(e->value)) {
                out.push_back(convert(*e, item));
            }
            if (out.empty()) {
                fail(key, *e, "empty list");
            }
        }
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : entries_) {
            if (!used_.count(key)) {
                fail(key, entry, "unknown key");
            }
        }
    }

private:
    const Entries& entries_;
    std::string origin_;
    std::set<std::string> used_;
};

fs::path resolve(const fs::path& base, const std::string& value) {
    const fs::path p(value);
    return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string SweepPoint::id() const {
    std::string tag = model.tag();
    std::replace(tag.begin(), tag.end(), ':', '-');
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s_tau%g_T%g_site%d", tag.c_str(), tau_c, temperature, initial_site);
    return buf;
}

double auto_dt(double tau_c, double record_interval) {
    const double cap = std::min(1.0, tau_c / 10.0);
    return record_interval / std::ceil(record_interval / cap - 1e-9);
}

double RunConfig::dt_for(double tau_c) const {
    return dt ? *dt : auto_dt(tau_c, record_interval);
}

std::vector<SweepPoint> RunConfig::points() const {
    const auto taus = sweep_tau_c.empty() ? std::vector<double>{noise.tau_c} : sweep_tau_c;
    const auto temps = sweep_temperature.empty() ? std::vector<double>{noise.temperature} : sweep_temperature;
    const auto models = sweep_models.empty() ? std::vector<SpatialModel>{spatial} : sweep_models;
    const auto sites = sweep_sites.empty() ? std::vector<int>{initial_site} : sweep_sites;
    std::vector<SweepPoint> out;
    for (double tau : taus) {
        for (double temp : temps) {
            for (const auto& model : models) {
                for (int site : sites) {
                    out.push_back({tau, temp, model, site});
                }
            }
        }
    }
    return out;
}

void RunConfig::validate() const {
    const auto where = [&](const std::string& key) {
        const auto it = key_lines.find(key);
        if (it == key_lines.end()) {
            return origin + ": " + key;
        }
        return it->second > 0 ? origin + ":" + std::to_string(it->second) + ": " + key : origin + ": " + key;
    };
    const auto fail = [&](const std::string& key, const std::string& msg) { throw InputError(where(key) + ": " + msg); };

    for (const auto& [key, path] : {std::pair{"files.hamiltonian", hamiltonian}, std::pair{"files.geometry", geometry}}) {
        if (!fs::is_regular_file(path)) {
            fail(key, "file not found: " + path.string());
        }
    }
    if (n_trajectories < 2) {
        fail("run.n_trajectories", "need at least 2 trajectories");
    }
    if (!(t_final > 0.0)) {
        fail("run.t_final", "must be positive");
    }
    if (!(record_interval > 0.0)) {
        fail("run.record_interval", "must be positive");
    }
    try {
        rates.validate(std::numeric_limits<int>::max());
    } catch (const InputError& e) {
        fail("rates", e.what());
    }
    for (const auto& p : points()) {
        const std::string tau_key = sweep_tau_c.empty() ? "noise.tau_c" : "sweep.tau_c";
        const std::string temp_key = sweep_temperature.empty() ? "noise.temperature" : "sweep.temperature";
        if (!(p.tau_c >= 1.0 && p.tau_c <= 1000.0)) {
            fail(tau_key, "tau_c = " + format_number(p.tau_c) + " fs outside [1, 1000]");
        }
        if (!(p.temperature >= 1.0 && p.temperature <= 1000.0)) {
            fail(temp_key, "temperature = " + format_number(p.temperature) + " K outside [1, 1000]");
        }
        NoiseConfig nc = noise;
        nc.tau_c = p.tau_c;
        nc.temperature = p.temperature;
        try {
            nc.validate();
        } catch (const InputError& e) {
            fail("noise", e.what());
        }
        PropagationSettings ps{t_final, dt_for(p.tau_c), record_interval, check_invariants, integrator};
        try {
            ps.validate(p.tau_c);
        } catch (const InputError& e) {
            fail(dt ? "run.dt" : "run.t_final", std::string(e.what()) + " (point " + p.id() + ")");
        }
        if (p.initial_site < 1) {
            fail(sweep_sites.empty() ? "run.initial_site" : "sweep.initial_site", "sites are numbered from 1");
        }
    }
}

EnsembleConfig RunConfig::ensemble_config(const SweepPoint& point) const {
    const SiteHamiltonian h = load_site_hamiltonian(hamiltonian);
    const Geometry g = load_geometry(geometry);
    NoiseConfig nc = noise;
    nc.tau_c = point.tau_c;
    nc.temperature = point.temperature;
    PropagationSettings ps{t_final, dt_for(point.tau_c), record_interval, check_invariants, integrator};
    EnsembleConfig cfg{h, g, rates, nc, build_correlation_matrix(point.model, g), point.initial_site, ps};
    cfg.validate();
    return cfg;
}

std::string RunConfig::canonical() const {
    const auto file_digest = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(buf.str())));
        return std::string(hex);
    };
    std::ostringstream out;
    out << "hamiltonian_fnv1a=" << file_digest(hamiltonian) << "\n"
        << "geometry_fnv1a=" << file_digest(geometry) << "\n"
        << "gamma_l=" << format_number(rates.gamma_l) << "\n"
        << "gamma_t=" << format_number(rates.gamma_t) << "\n"
        << "trap_site=" << rates.trap_site << "\n"
        << "e_r=" << format_number(noise.e_r) << "\n"
        << "t_final=" << format_number(t_final) << "\n"
        << "dt=" << (dt ? format_number(*dt) : "auto") << "\n"
        << "record_interval=" << format_number(record_interval) << "\n"
        << "integrator=" << integrator_name(integrator) << "\n"
        << "n_trajectories=" << n_trajectories << "\n"
        << "master_seed=" << master_seed << "\n";
    for (const auto& p : points()) {
        out << "point=" << p.model.tag() << "," << format_number(p.tau_c) << "," << format_number(p.temperature) << ","
            << p.initial_site << "\n";
    }
    return out.str();
}

std::uint64_t RunConfig::hash() const {
    return fnv1a(canonical());
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin, const fs::path& base_dir) {
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool is_json = first != std::string::npos && text[first] == '{';
    const Entries entries = is_json ? parse_json(text, origin) : parse_key_value(text, origin);

    RunConfig cfg;
    cfg.origin = origin;
    for (const auto& [key, entry] : entries) {
        cfg.key_lines[key] = entry.line;
    }
    Reader r(entries, origin);

    const fs::path data_dir(EETSIM_DATA_DIR);
    cfg.hamiltonian = data_dir / "fmo_ctepidum_hamiltonian.txt";
    cfg.geometry = data_dir / "fmo_ctepidum_geometry.txt";
    if (const Entry* e = r.find("files.hamiltonian")) {
        cfg.hamiltonian = resolve(base_dir, e->value);
    }
    if (const Entry* e = r.find("files.geometry")) {
        cfg.geometry = resolve(base_dir, e->value);
    }
    cfg.output_dir = resolve(base_dir, "results");
    if (const Entry* e = r.find("output.directory")) {
        cfg.output_dir = resolve(base_dir, e->value);
    }
    r.read("output.plots", cfg.plots);

    r.read("rates.gamma_l", cfg.rates.gamma_l);
    r.read("rates.gamma_t", cfg.rates.gamma_t);
    r.read("rates.trap_site", cfg.rates.trap_site);

    r.read("noise.tau_c", cfg.noise.tau_c);
    r.read("noise.e_r", cfg.noise.e_r);
    r.read("noise.temperature", cfg.noise.temperature);

    const auto parse_model = [&](const Entry& e, const std::string& key, const std::string& tag) {
        try {
            return SpatialModel::parse(tag);
        } catch (const InputError& err) {
            r.fail(key, e, err.what());
        }
    };
    if (const Entry* e = r.find("spatial.model")) {
        cfg.spatial = parse_model(*e, "spatial.model", e->value);
    }
    if (const Entry* e = r.find("spatial.rc_angstrom")) {
        if (cfg.spatial.kind != SpatialKind::Exponential) {
            r.fail("spatial.rc_angstrom", *e, "only applies to the exponential model");
        }
        cfg.spatial.rc_angstrom = r.number(*e, "spatial.rc_angstrom", e->value);
        if (!(cfg.spatial.rc_angstrom > 0.0)) {
            r.fail("spatial.rc_angstrom", *e, "must be positive");
        }
    }
    if (const Entry* e = r.find("spatial.power")) {
        if (cfg.spatial.kind != SpatialKind::InverseSquare) {
            r.fail("spatial.power", *e, "only applies to the inverse_square model");
        }
        cfg.spatial.power = r.number(*e, "spatial.power", e->value);
        if (!(cfg.spatial.power > 0.0)) {
            r.fail("spatial.power", *e, "must be positive");
        }
    }

    r.read("run.initial_site", cfg.initial_site);
    r.read("run.t_final", cfg.t_final);
    if (const Entry* e = r.find("run.dt")) {
        if (e->value != "auto") {
            cfg.dt = r.number(*e, "run.dt", e->value);
        }
    }
    r.read("run.record_interval", cfg.record_interval);
    if (const Entry* e = r.find("run.integrator")) {
        try {
            cfg.integrator = parse_integrator(e->value);
        } catch (const InputError& err) {
            r.fail("run.integrator", *e, err.what());
        }
    }
    r.read("run.check_invariants", cfg.check_invariants);
    r.read_count("run.n_trajectories", cfg.n_trajectories);
    r.read("run.master_seed", cfg.master_seed);

    const auto to_number = [&](const std::string& key) {
        return [&r, key](const Entry& e, const std::string& item) { return r.number(e, key, item); };
    };
    r.read_list("sweep.tau_c", cfg.sweep_tau_c, to_number("sweep.tau_c"));
    r.read_list("sweep.temperature", cfg.sweep_temperature, to_number("sweep.temperature"));
    r.read_list("sweep.models", cfg.sweep_models,
                [&](const Entry& e, const std::string& item) { return parse_model(e, "sweep.models", item); });
    r.read_list("sweep.initial_site", cfg.sweep_sites, [&](const Entry& e, const std::string& item) {
        const double v = r.number(e, "sweep.initial_site", item);
        if (v != std::floor(v)) {
            r.fail("sweep.initial_site", e, "expected integers");
        }
        return static_cast<int>(v);
    });

    r.reject_unknown();
    return cfg;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.string(), fs::absolute(path).parent_path());
}

}  // namespace eetsim
