#include "lfc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lfc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_number(const std::string& s, double& v) {
    const std::string t = trim(s);
    if (t == "inf" || t == "+inf") {
        v = std::numeric_limits<double>::infinity();
        return true;
    }
    if (t.empty()) return false;
    char* end = nullptr;
    v = std::strtod(t.c_str(), &end);
    return end && *end == '\0' && !std::isnan(v);
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

}  // namespace

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header in " + origin, line);
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError("empty section name in " + origin, line);
            if (ini.data_.count(section)) throw ConfigError("duplicate section [" + section + "] in " + origin, line);
            ini.data_[section];
            ini.order_.push_back(section);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value' in " + origin, line);
        if (section.empty()) throw ConfigError("entry outside any section in " + origin, line);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key in " + origin, line);
        auto& sec = ini.data_[section];
        if (sec.count(key)) throw ConfigError("duplicate key '" + key + "' in [" + section + "] of " + origin, line);
        sec[key] = {trim(s.substr(eq + 1)), line};
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

bool IniFile::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const IniFile::Entry* IniFile::find(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

std::vector<std::string> IniFile::sections() const { return order_; }

std::vector<std::string> IniFile::keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto s = data_.find(section);
    if (s != data_.end()) {
        for (const auto& [k, e] : s->second) out.push_back(k);
    }
    return out;
}

void IniFile::set(const std::string& section, const std::string& key, const std::string& value) {
    if (!data_.count(section)) order_.push_back(section);
    data_[section][key] = {value, 0};
}

void IniFile::fail(const std::string& section, const std::string& key, const std::string& why) const {
    const Entry* e = find(section, key);
    throw ConfigError("[" + section + "] " + key + ": " + why + " (" + origin_ + ")", e ? e->line : 0);
}

std::optional<double> IniFile::get_double(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    double v = 0.0;
    if (!parse_number(e->value, v)) fail(section, key, "expected a number, got '" + e->value + "'");
    return v;
}

std::optional<long> IniFile::get_int(const std::string& section, const std::string& key) const {
    const auto v = get_double(section, key);
    if (!v) return std::nullopt;
    if (!std::isfinite(*v) || std::floor(*v) != *v) fail(section, key, "expected an integer");
    return static_cast<long>(*v);
}

std::optional<bool> IniFile::get_bool(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(section, key, "expected true or false, got '" + e->value + "'");
}

std::optional<std::string> IniFile::get_string(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
}

std::optional<Vec> IniFile::get_vec(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    const auto parts = split(e->value, ',');
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!parse_number(parts[i], v[static_cast<Eigen::Index>(i)])) {
            fail(section, key, "expected a comma-separated list of numbers");
        }
    }
    return v;
}

std::string IniFile::dump() const {
    std::string out;
    for (const auto& s : order_) {
        out += "[" + s + "]\n";
        for (const auto& [k, e] : data_.at(s)) out += k + " = " + e.value + "\n";
        out += "\n";
    }
    return out;
}

std::vector<Line> parse_lines(const std::string& text) {
    std::vector<Line> out;
    for (const auto& item : split(text, ',')) {
        const auto colon = item.find(':');
        const auto dash = item.find('-');
        if (colon == std::string::npos || dash == std::string::npos || dash > colon) {
            throw ConfigError("line entry '" + item + "' must look like 1-2:28.1");
        }
        double a = 0, b = 0, B = 0;
        if (!parse_number(item.substr(0, dash), a) || !parse_number(item.substr(dash + 1, colon - dash - 1), b) ||
            !parse_number(item.substr(colon + 1), B)) {
            throw ConfigError("line entry '" + item + "' must look like 1-2:28.1");
        }
        out.push_back({static_cast<int>(a) - 1, static_cast<int>(b) - 1, B});
    }
    return out;
}

std::vector<std::pair<int, int>> parse_edges(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    for (const auto& item : split(text, ',')) {
        const auto dash = item.find('-');
        double a = 0, b = 0;
        if (dash == std::string::npos || !parse_number(item.substr(0, dash), a) ||
            !parse_number(item.substr(dash + 1), b)) {
            throw ConfigError("edge entry '" + item + "' must look like 1-4");
        }
        out.emplace_back(static_cast<int>(a) - 1, static_cast<int>(b) - 1);
    }
    return out;
}

SinusoidBankParams parse_bank(const std::string& text) {
    const auto parts = split(text, '|');
    SinusoidBankParams bank;
    if (!parse_number(parts[0], bank.offset)) throw ConfigError("sinusoid bank must start with its offset");
    for (std::size_t i = 1; i < parts.size(); ++i) {
        std::istringstream ss(parts[i]);
        Sinusoid s;
        std::string extra;
        if (!(ss >> s.amplitude >> s.rate >> s.phase) || (ss >> extra)) {
            throw ConfigError("sinusoid term '" + parts[i] + "' must be 'amplitude rate phase'");
        }
        bank.terms.push_back(s);
    }
    return bank;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"network",
         {"areas", "lines", "B_self", "tau_p", "tau_v", "tau_c", "tau_delta", "psi", "xi", "X_d", "X_d_prime", "E_f",
          "omega_base", "S_base"}},
        {"cost", {"q", "r", "c"}},
        {"comm", {"edges"}},
        {"exo.scenario1",
         {"kappa0", "s0", "h", "wind_base", "wind_offset", "load_base", "load_amplitude", "load_rate"}},
        {"exo.scenario3", {}},
        {"sim",
         {"scenario", "controller", "integrator", "dt", "abs_tol", "rel_tol", "horizon", "record_dt", "noise",
          "noise_std", "seed", "omega0", "divergence_norm", "settle_band", "data_dir", "data_units",
          "time_compression", "approx_solution", "tracker_warmup", "tracker_dt", "tracker_merge_tol"}},
        {"approx",
         {"order", "t_trans", "t_avg", "dt", "node_dt", "eps_bar", "max_iter", "stall_iters", "fd_step",
          "lm_lambda0"}},
    };
    return keys;
}

std::string resolve_path(const IniFile& ini, const std::string& p) {
    namespace fs = std::filesystem;
    if (p.empty() || fs::path(p).is_absolute() || ini.origin().empty() || ini.origin().front() == '<') return p;
    return (fs::path(ini.origin()).parent_path() / p).lexically_normal().string();
}

}  // namespace

ScenarioConfig load_config(const IniFile& ini) {
    for (const auto& s : ini.sections()) {
        const auto it = known_keys().find(s);
        if (it == known_keys().end()) {
            const auto k = ini.keys(s);
            const IniFile::Entry* e = k.empty() ? nullptr : ini.find(s, k.front());
            throw ConfigError("unknown section [" + s + "] in " + ini.origin(), e ? e->line - 1 : 0);
        }
        for (const auto& k : ini.keys(s)) {
            const bool bank = s == "exo.scenario3" && (k.rfind("load_", 0) == 0 || k.rfind("wind_", 0) == 0);
            if (!bank && !it->second.count(k)) {
                throw ConfigError("unknown key '" + k + "' in [" + s + "] of " + ini.origin(), ini.find(s, k)->line);
            }
        }
    }

    ScenarioConfig cfg;
    auto& p = cfg.network;
    auto guarded = [&](const std::string& sec, const std::string& key, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError& e) {
            if (e.line() > 0) throw;
            const IniFile::Entry* en = ini.find(sec, key);
            throw ConfigError(std::string(e.what()) + " ([" + sec + "] " + key + ", " + ini.origin() + ")",
                              en ? en->line : 0);
        }
    };

    if (auto v = ini.get_int("network", "areas")) {
        if (*v < 1) throw ConfigError("[network] areas must be positive", ini.find("network", "areas")->line);
        p.n = static_cast<int>(*v);
    }
    if (auto s = ini.get_string("network", "lines")) guarded("network", "lines", [&] { p.lines = parse_lines(*s); });
    const std::pair<const char*, Vec*> vecs[] = {
        {"B_self", &p.B_self}, {"tau_p", &p.tau_p}, {"tau_v", &p.tau_v}, {"tau_c", &p.tau_c},
        {"tau_delta", &p.tau_delta}, {"psi", &p.psi}, {"xi", &p.xi}, {"X_d", &p.X_d},
        {"X_d_prime", &p.X_d_prime}, {"E_f", &p.E_f}};
    for (const auto& [key, dst] : vecs) {
        if (auto v = ini.get_vec("network", key)) *dst = *v;
    }
    if (auto v = ini.get_double("network", "omega_base")) p.omega_base = *v;
    if (auto v = ini.get_double("network", "S_base")) p.S_base = *v;
    if (auto v = ini.get_vec("cost", "q")) p.cost.q = *v;
    if (auto v = ini.get_vec("cost", "r")) p.cost.r = *v;
    if (auto v = ini.get_vec("cost", "c")) p.cost.c = *v;
    if (auto s = ini.get_string("comm", "edges")) guarded("comm", "edges", [&] { p.comm_edges = parse_edges(*s); });

    auto& e1 = cfg.sim.exo1;
    {
        const auto k = ini.get_vec("exo.scenario1", "kappa0");
        const auto s0 = ini.get_vec("exo.scenario1", "s0");
        const auto h = ini.get_vec("exo.scenario1", "h");
        if (k || s0 || h) {
            if (!k || !s0 || !h || k->size() != s0->size() || k->size() != h->size()) {
                const char* key = !k ? "s0" : "kappa0";
                const IniFile::Entry* en = ini.find("exo.scenario1", key);
                throw ConfigError("[exo.scenario1] kappa0, s0 and h must be given together with equal lengths",
                                  en ? en->line : 0);
            }
            e1.wind.clear();
            for (Eigen::Index i = 0; i < k->size(); ++i) e1.wind.push_back({(*k)[i], (*s0)[i], (*h)[i]});
        }
    }
    if (auto v = ini.get_vec("exo.scenario1", "wind_base")) e1.wind_base = *v;
    if (auto v = ini.get_vec("exo.scenario1", "wind_offset")) e1.wind_offset = *v;
    if (auto v = ini.get_vec("exo.scenario1", "load_base")) e1.load_base = *v;
    if (auto v = ini.get_vec("exo.scenario1", "load_amplitude")) e1.load_amplitude = *v;
    if (auto v = ini.get_double("exo.scenario1", "load_rate")) e1.load_rate = *v;

    auto& e3 = cfg.sim.exo3;
    for (const auto& k : ini.keys("exo.scenario3")) {
        const bool load = k.rfind("load_", 0) == 0;
        double idx = 0;
        const IniFile::Entry* en = ini.find("exo.scenario3", k);
        if (!parse_number(k.substr(5), idx) || idx < 1 || std::floor(idx) != idx) {
            throw ConfigError("[exo.scenario3] keys must be load_<area> or wind_<area>", en->line);
        }
        auto& banks = load ? e3.load : e3.wind;
        const auto i = static_cast<std::size_t>(idx) - 1;
        if (i >= banks.size()) banks.resize(i + 1);
        guarded("exo.scenario3", k, [&] { banks[i] = parse_bank(en->value); });
    }

    auto& s = cfg.sim;
    s.horizon = std::numeric_limits<double>::quiet_NaN();
    if (auto v = ini.get_int("sim", "scenario")) s.scenario = static_cast<int>(*v);
    if (auto v = ini.get_string("sim", "controller")) s.controller = *v;
    if (auto v = ini.get_string("sim", "integrator")) {
        guarded("sim", "integrator", [&] {
            try {
                s.integrator.method = parse_method(*v);
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
        });
    }
    if (auto v = ini.get_double("sim", "dt")) s.integrator.dt = *v;
    if (auto v = ini.get_double("sim", "abs_tol")) s.integrator.abs_tol = *v;
    if (auto v = ini.get_double("sim", "rel_tol")) s.integrator.rel_tol = *v;
    if (auto v = ini.get_double("sim", "horizon")) s.horizon = *v;
    if (auto v = ini.get_double("sim", "record_dt")) s.record_dt = *v;
    if (auto v = ini.get_bool("sim", "noise")) s.noise = *v;
    if (auto v = ini.get_double("sim", "noise_std")) s.noise_std = *v;
    if (auto v = ini.get_int("sim", "seed")) s.seed = static_cast<std::uint64_t>(*v);
    if (auto v = ini.get_vec("sim", "omega0")) s.omega0 = *v;
    if (auto v = ini.get_double("sim", "divergence_norm")) s.divergence_norm = *v;
    if (auto v = ini.get_double("sim", "settle_band")) s.settle_band = *v;
    if (auto v = ini.get_string("sim", "data_dir")) s.data_dir = resolve_path(ini, *v);
    if (auto v = ini.get_string("sim", "data_units")) {
        if (*v == "MW" || *v == "mw") s.data_units = PowerUnits::MW;
        else if (*v == "pu" || *v == "p.u.") s.data_units = PowerUnits::PerUnit;
        else throw ConfigError("[sim] data_units must be MW or pu", ini.find("sim", "data_units")->line);
    }
    if (auto v = ini.get_double("sim", "time_compression")) s.time_compression = *v;
    if (auto v = ini.get_string("sim", "approx_solution")) s.approx_solution = resolve_path(ini, *v);
    if (auto v = ini.get_double("sim", "tracker_warmup")) s.tracker.warmup = *v;
    if (auto v = ini.get_double("sim", "tracker_dt")) s.tracker.dt = *v;
    if (auto v = ini.get_double("sim", "tracker_merge_tol")) s.tracker.merge_tol = *v;

    auto& a = s.approx;
    if (auto v = ini.get_int("approx", "order")) a.order = static_cast<int>(*v);
    if (auto v = ini.get_double("approx", "t_trans")) a.t_trans = *v;
    if (auto v = ini.get_double("approx", "t_avg")) a.t_avg = *v;
    if (auto v = ini.get_double("approx", "dt")) a.dt = *v;
    if (auto v = ini.get_double("approx", "node_dt")) a.node_dt = *v;
    if (auto v = ini.get_double("approx", "eps_bar")) a.eps_bar = *v;
    if (auto v = ini.get_int("approx", "max_iter")) a.max_iter = static_cast<int>(*v);
    if (auto v = ini.get_int("approx", "stall_iters")) a.stall_iters = static_cast<int>(*v);
    if (auto v = ini.get_double("approx", "fd_step")) a.fd_step = *v;
    if (auto v = ini.get_double("approx", "lm_lambda0")) a.lm_lambda0 = *v;

    auto check = [&](bool ok, const char* sec, const char* key, const char* why) {
        if (!ok) {
            const IniFile::Entry* en = ini.find(sec, key);
            throw ConfigError(std::string("[") + sec + "] " + key + ": " + why + " (" + ini.origin() + ")",
                              en ? en->line : 0);
        }
    };
    check(s.scenario >= 1 && s.scenario <= 3, "sim", "scenario", "must be 1, 2 or 3");
    check(s.integrator.dt > 0.0, "sim", "dt", "must be positive");
    check(s.record_dt > 0.0, "sim", "record_dt", "must be positive");
    check(s.noise_std >= 0.0, "sim", "noise_std", "must be non-negative");
    check(std::isnan(s.horizon) || s.horizon > 0.0, "sim", "horizon", "must be positive");
    check(s.time_compression > 0.0, "sim", "time_compression", "must be positive");
    check(a.order >= 0, "approx", "order", "must be non-negative");
    check(a.eps_bar >= 0.0, "approx", "eps_bar", "must be non-negative (inf skips the descent)");
    check(a.max_iter >= 0, "approx", "max_iter", "must be non-negative");
    check(a.stall_iters >= 1, "approx", "stall_iters", "must be positive");
    // network validation happens in the Network constructor; anchor its errors to [network]
    try {
        Network probe(p);
    } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        const std::string msg = e.what();
        const IniFile::Entry* en = nullptr;
        if (msg.find("line") != std::string::npos || msg.find("disconnected") != std::string::npos) {
            en = ini.find("network", "lines");
        }
        if (!en) en = ini.find("network", "areas");
        if (!en) {
            for (const auto& k : ini.keys("network")) {
                en = ini.find("network", k);
                break;
            }
        }
        throw ConfigError(std::string(e.what()) + " (" + ini.origin() + ")", en ? en->line : 0);
    }
    return cfg;
}

void finalize_config(ScenarioConfig& cfg) {
    if (std::isnan(cfg.sim.horizon)) cfg.sim.horizon = default_horizon(cfg.sim.scenario);
}

ScenarioConfig load_config_file(const std::string& path) { return load_config(IniFile::load(path)); }

std::string format_config(const ScenarioConfig& cfg) {
    const auto& p = cfg.network;
    std::ostringstream o;
    o << "[network]\nareas = " << p.n << "\nlines = ";
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        o << (i ? ", " : "") << p.lines[i].from + 1 << "-" << p.lines[i].to + 1 << ":" << fmt(p.lines[i].susceptance);
    }
    o << "\nB_self = " << fmt(p.B_self) << "\ntau_p = " << fmt(p.tau_p) << "\ntau_v = " << fmt(p.tau_v)
      << "\ntau_c = " << fmt(p.tau_c) << "\ntau_delta = " << fmt(p.tau_delta) << "\npsi = " << fmt(p.psi)
      << "\nxi = " << fmt(p.xi) << "\nX_d = " << fmt(p.X_d) << "\nX_d_prime = " << fmt(p.X_d_prime)
      << "\nE_f = " << fmt(p.E_f) << "\nomega_base = " << fmt(p.omega_base) << "\nS_base = " << fmt(p.S_base)
      << "\n\n[cost]\nq = " << fmt(p.cost.q) << "\nr = " << fmt(p.cost.r) << "\nc = " << fmt(p.cost.c)
      << "\n\n[comm]\nedges = ";
    for (std::size_t i = 0; i < p.comm_edges.size(); ++i) {
        o << (i ? ", " : "") << p.comm_edges[i].first + 1 << "-" << p.comm_edges[i].second + 1;
    }
    const auto& e1 = cfg.sim.exo1;
    Vec k(static_cast<Eigen::Index>(e1.wind.size())), s0(k.size()), h(k.size());
    for (std::size_t i = 0; i < e1.wind.size(); ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        k[j] = e1.wind[i].kappa0;
        s0[j] = e1.wind[i].s0;
        h[j] = e1.wind[i].h;
    }
    o << "\n\n[exo.scenario1]\nkappa0 = " << fmt(k) << "\ns0 = " << fmt(s0) << "\nh = " << fmt(h)
      << "\nwind_base = " << fmt(e1.wind_base) << "\nwind_offset = " << fmt(e1.wind_offset)
      << "\nload_base = " << fmt(e1.load_base) << "\nload_amplitude = " << fmt(e1.load_amplitude)
      << "\nload_rate = " << fmt(e1.load_rate) << "\n\n[exo.scenario3]\n";
    auto bank = [&](const SinusoidBankParams& b) {
        std::string s = fmt(b.offset);
        for (const auto& t : b.terms) s += " | " + fmt(t.amplitude) + " " + fmt(t.rate) + " " + fmt(t.phase);
        return s;
    };
    for (std::size_t i = 0; i < cfg.sim.exo3.load.size(); ++i) o << "load_" << i + 1 << " = " << bank(cfg.sim.exo3.load[i]) << "\n";
    for (std::size_t i = 0; i < cfg.sim.exo3.wind.size(); ++i) o << "wind_" << i + 1 << " = " << bank(cfg.sim.exo3.wind[i]) << "\n";
    const auto& s = cfg.sim;
    o << "\n[sim]\nscenario = " << s.scenario << "\ncontroller = " << s.controller
      << "\nintegrator = " << method_name(s.integrator.method) << "\ndt = " << fmt(s.integrator.dt)
      << "\nabs_tol = " << fmt(s.integrator.abs_tol) << "\nrel_tol = " << fmt(s.integrator.rel_tol);
    if (!std::isnan(s.horizon)) o << "\nhorizon = " << fmt(s.horizon);
    o << "\nrecord_dt = " << fmt(s.record_dt) << "\nnoise = " << (s.noise ? "true" : "false")
      << "\nnoise_std = " << fmt(s.noise_std) << "\nseed = " << s.seed;
    if (s.omega0) o << "\nomega0 = " << fmt(*s.omega0);
    o << "\ndivergence_norm = " << fmt(s.divergence_norm) << "\nsettle_band = " << fmt(s.settle_band);
    if (!s.data_dir.empty()) o << "\ndata_dir = " << std::filesystem::absolute(s.data_dir).lexically_normal().string();
    o << "\ndata_units = " << (s.data_units == PowerUnits::MW ? "MW" : "pu")
      << "\ntime_compression = " << fmt(s.time_compression);
    if (!s.approx_solution.empty()) {
        o << "\napprox_solution = " << std::filesystem::absolute(s.approx_solution).lexically_normal().string();
    }
    o << "\ntracker_warmup = " << fmt(s.tracker.warmup) << "\ntracker_dt = " << fmt(s.tracker.dt)
      << "\ntracker_merge_tol = " << fmt(s.tracker.merge_tol);
    const auto& a = s.approx;
    o << "\n\n[approx]\norder = " << a.order << "\nt_trans = " << fmt(a.t_trans) << "\nt_avg = " << fmt(a.t_avg)
      << "\ndt = " << fmt(a.dt) << "\nnode_dt = " << fmt(a.node_dt) << "\neps_bar = " << fmt(a.eps_bar)
      << "\nmax_iter = " << a.max_iter << "\nstall_iters = " << a.stall_iters << "\nfd_step = " << fmt(a.fd_step)
      << "\nlm_lambda0 = " << fmt(a.lm_lambda0) << "\n";
    return o.str();
}

}  // namespace lfc
