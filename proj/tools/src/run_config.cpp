#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace oseen::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view text)
{
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view text)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw ConfigError("not a boolean: '" + std::string(text) + "'");
}

template <typename T>
std::vector<T> parse_list(std::string_view text)
{
    std::vector<T> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        if (item.empty()) {
            throw ConfigError("empty list item");
        }
        out.push_back(parse_number<T>(item));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        if constexpr (std::is_floating_point_v<T>) {
            out += number(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

struct Field {
    std::string section;  // empty: top level
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <typename T>
Field num(std::string section, std::string key, T RunConfig::*member)
{
    return {std::move(section), std::move(key),
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return number(c.*member);
                } else {
                    return std::to_string(c.*member);
                }
            },
            [member](RunConfig& c, std::string_view v) { c.*member = parse_number<T>(v); }};
}

// Accessor for a field nested one struct deep.
template <typename S, typename T>
Field nested(std::string section, std::string key, S RunConfig::*outer, T S::*inner)
{
    return {std::move(section), std::move(key),
            [outer, inner](const RunConfig& c) {
                const T& v = c.*outer.*inner;
                if constexpr (std::is_same_v<T, bool>) {
                    return std::string(v ? "true" : "false");
                } else if constexpr (std::is_floating_point_v<T>) {
                    return number(v);
                } else if constexpr (std::is_integral_v<T>) {
                    return std::to_string(v);
                } else {
                    return join(v);
                }
            },
            [outer, inner](RunConfig& c, std::string_view v) {
                T& dst = c.*outer.*inner;
                if constexpr (std::is_same_v<T, bool>) {
                    dst = parse_bool(v);
                } else if constexpr (std::is_arithmetic_v<T>) {
                    dst = parse_number<T>(v);
                } else {
                    dst = parse_list<typename T::value_type>(v);
                }
            }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"", "experiment", [](const RunConfig& c) { return std::string(to_string(c.experiment)); },
                     [](RunConfig& c, std::string_view v) {
                         const auto e = parse_experiment(v);
                         if (!e) {
                             throw ConfigError("unknown experiment '" + std::string(v) + "'");
                         }
                         c.experiment = *e;
                     }});
        f.push_back({"", "out", [](const RunConfig& c) { return c.out; },
                     [](RunConfig& c, std::string_view v) { c.out = std::string(v); }});

        f.push_back(num("run", "degree", &RunConfig::degree));
        f.push_back(num("run", "levels", &RunConfig::levels));
        f.push_back(num("run", "seed", &RunConfig::seed));
        f.push_back(num("run", "threads", &RunConfig::threads));

        f.push_back(nested("physics", "mu", &RunConfig::params, &PhysParams::mu));
        f.push_back(nested("physics", "rho", &RunConfig::params, &PhysParams::rho));
        f.push_back(nested("physics", "sigma", &RunConfig::params, &PhysParams::sigma));
        f.push_back(nested("physics", "lambda", &RunConfig::params, &PhysParams::lambda));
        f.push_back(nested("physics", "delta", &RunConfig::params, &PhysParams::delta));

        f.push_back({"solver", "method",
                     [](const RunConfig& c) {
                         return std::string(c.solver.method == SolverMethod::Direct ? "direct" : "krylov");
                     },
                     [](RunConfig& c, std::string_view v) {
                         if (v == "direct") {
                             c.solver.method = SolverMethod::Direct;
                         } else if (v == "krylov" || v == "gmres") {
                             c.solver.method = SolverMethod::Krylov;
                         } else {
                             throw ConfigError("unknown solver method '" + std::string(v) + "'");
                         }
                     }});
        f.push_back(nested("solver", "rtol", &RunConfig::solver, &SolverOptions::rtol));
        f.push_back(nested("solver", "max_iterations", &RunConfig::solver, &SolverOptions::max_iterations));
        f.push_back(nested("solver", "restart", &RunConfig::solver, &SolverOptions::restart));
        f.push_back(num("solver", "exactness", &RunConfig::exactness));

        f.push_back(nested("picard", "tol", &RunConfig::picard, &PicardOptions::tol));
        f.push_back(nested("picard", "max_iter", &RunConfig::picard, &PicardOptions::max_iter));

        using K = KovasznaySection;
        f.push_back(nested("kovasznay", "mu_values", &RunConfig::kovasznay, &K::mu_values));
        f.push_back({"kovasznay", "zeta", [](const RunConfig& c) { return std::string(to_string(c.kovasznay.zeta)); },
                     [](RunConfig& c, std::string_view v) {
                         const auto z = parse_zeta_variant(v);
                         if (!z) {
                             throw ConfigError("zeta must be 'paper' or 'standard'");
                         }
                         c.kovasznay.zeta = *z;
                     }});
        f.push_back(nested("kovasznay", "linear", &RunConfig::kovasznay, &K::linear));
        f.push_back(nested("kovasznay", "nonlinear", &RunConfig::kovasznay, &K::nonlinear));
        f.push_back(nested("kovasznay", "a_scale", &RunConfig::kovasznay, &K::a_scale));
        f.push_back(nested("kovasznay", "base_cells", &RunConfig::kovasznay, &K::base_cells));
        f.push_back({"kovasznay", "pattern",
                     [](const RunConfig& c) {
                         return std::string(c.kovasznay.pattern == TriPattern::Right ? "right" : "crisscross");
                     },
                     [](RunConfig& c, std::string_view v) {
                         if (v == "right") {
                             c.kovasznay.pattern = TriPattern::Right;
                         } else if (v == "crisscross") {
                             c.kovasznay.pattern = TriPattern::CrissCross;
                         } else {
                             throw ConfigError("pattern must be 'right' or 'crisscross'");
                         }
                     }});

        using B = BentRandomSection;
        f.push_back(nested("bent_random", "n_across", &RunConfig::bent_random, &B::n_across));
        f.push_back(nested("bent_random", "n_along", &RunConfig::bent_random, &B::n_along));
        f.push_back(nested("bent_random", "max_speed", &RunConfig::bent_random, &B::max_speed));
        f.push_back(nested("bent_random", "inner_radius", &RunConfig::bent_random, &B::inner_radius));
        f.push_back(nested("bent_random", "outer_radius", &RunConfig::bent_random, &B::outer_radius));
        f.push_back(nested("bent_random", "leg_length", &RunConfig::bent_random, &B::leg_length));
        f.push_back(nested("bent_random", "a_scale", &RunConfig::bent_random, &B::a_scale));

        using N = NsRecoverySection;
        f.push_back(nested("ns_recovery", "coarse_nx", &RunConfig::ns_recovery, &N::coarse_nx));
        f.push_back(nested("ns_recovery", "coarse_ny", &RunConfig::ns_recovery, &N::coarse_ny));
        f.push_back(nested("ns_recovery", "reference_nx", &RunConfig::ns_recovery, &N::reference_nx));
        f.push_back(nested("ns_recovery", "reference_ny", &RunConfig::ns_recovery, &N::reference_ny));
        f.push_back(nested("ns_recovery", "flow_sigma", &RunConfig::ns_recovery, &N::flow_sigma));
        f.push_back(nested("ns_recovery", "viscous_datum", &RunConfig::ns_recovery, &N::viscous_datum));
        f.push_back(nested("ns_recovery", "profile_samples", &RunConfig::ns_recovery, &N::profile_samples));

        using C = CheckSection;
        f.push_back(nested("check", "degrees", &RunConfig::check, &C::degrees));
        f.push_back(nested("check", "mesh_sizes", &RunConfig::check, &C::mesh_sizes));
        f.push_back(nested("check", "random_vectors", &RunConfig::check, &C::random_vectors));
        f.push_back(nested("check", "trilinear_triples", &RunConfig::check, &C::trilinear_triples));
        return f;
    }();
    return table;
}

struct Entry {
    std::string value;
    int line = 0;
};

} // namespace

std::string_view to_string(Experiment e)
{
    switch (e) {
    case Experiment::Kovasznay: return "kovasznay";
    case Experiment::BentRandom: return "bent-random";
    case Experiment::NsRecovery: return "ns-recovery";
    case Experiment::Check: return "check";
    }
    return "?";
}

std::optional<Experiment> parse_experiment(std::string_view text)
{
    for (const Experiment e : {Experiment::Kovasznay, Experiment::BentRandom, Experiment::NsRecovery,
                               Experiment::Check}) {
        if (text == to_string(e)) {
            return e;
        }
    }
    return std::nullopt;
}

RunConfig default_config(Experiment e)
{
    RunConfig c;
    c.experiment = e;
    switch (e) {
    case Experiment::Kovasznay:
        c.params = {1.0, 1.0, 1.0, 0.5, 0.001};
        c.picard = {1e-6, 25};
        break;
    case Experiment::BentRandom:
        c.params = {0.0483, 1.119, 5.37, 0.5, 0.5};
        c.levels = 1;
        break;
    case Experiment::NsRecovery:
        c.params = {0.035, 1.0, 3.92, 0.5, 0.001};
        c.picard = {1e-10, 200};
        c.levels = 1;
        break;
    case Experiment::Check:
        c.params = {1.0, 1.0, 1.0, 0.5, 0.001};
        c.levels = 1;
        break;
    }
    return c;
}

void RunConfig::validate() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    require(degree >= 1 && degree <= 3, "run.degree must be 1, 2 or 3");
    require(levels >= 1, "run.levels must be >= 1");
    require(threads >= 1, "run.threads must be >= 1");
    require(!out.empty(), "out must not be empty");
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("physics: ") + e.what());
    }
    require(solver.rtol > 0.0, "solver.rtol must be positive");
    require(solver.max_iterations >= 1 && solver.restart >= 1, "solver iteration limits must be >= 1");
    require(exactness >= 0 && exactness <= 10, "solver.exactness must be in 0..10");
    require(picard.tol > 0.0 && picard.max_iter >= 1, "picard.tol must be positive and picard.max_iter >= 1");

    switch (experiment) {
    case Experiment::Kovasznay:
        require(levels >= 2, "kovasznay needs run.levels >= 2");
        require(!kovasznay.mu_values.empty(), "kovasznay.mu_values must not be empty");
        for (const double mu : kovasznay.mu_values) {
            require(mu > 0.0, "kovasznay.mu_values must be positive");
        }
        require(kovasznay.linear || kovasznay.nonlinear, "kovasznay: enable linear and/or nonlinear");
        require(kovasznay.base_cells >= 1, "kovasznay.base_cells must be >= 1");
        break;
    case Experiment::BentRandom:
        require(bent_random.n_across >= 1 && bent_random.n_along >= 3, "bent_random grid too small");
        require(bent_random.max_speed >= 0.0, "bent_random.max_speed must be >= 0");
        require(bent_random.inner_radius > 0.0 && bent_random.outer_radius > bent_random.inner_radius &&
                    bent_random.leg_length > 0.0,
                "bent_random: need 0 < inner_radius < outer_radius and leg_length > 0");
        break;
    case Experiment::NsRecovery:
        require(ns_recovery.coarse_nx >= 1 && ns_recovery.coarse_ny >= 1, "ns_recovery coarse grid too small");
        require(ns_recovery.reference_nx >= 1 && ns_recovery.reference_ny >= 1,
                "ns_recovery reference grid too small");
        require(ns_recovery.flow_sigma >= 0.0, "ns_recovery.flow_sigma must be >= 0");
        require(ns_recovery.profile_samples >= 2, "ns_recovery.profile_samples must be >= 2");
        break;
    case Experiment::Check:
        require(!check.degrees.empty() && !check.mesh_sizes.empty(), "check: degrees and mesh_sizes required");
        for (const int k : check.degrees) {
            require(k >= 1 && k <= 3, "check.degrees must be in 1..3");
        }
        for (const int n : check.mesh_sizes) {
            require(n >= 1, "check.mesh_sizes must be >= 1");
        }
        require(check.random_vectors >= 1 && check.trilinear_triples >= 1, "check sample counts must be >= 1");
        break;
    }
}

RunConfig parse_config(std::string_view text)
{
    std::map<std::string, Entry> entries;
    std::set<std::string> sections;
    for (const Field& f : fields()) {
        sections.insert(f.section);
    }
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + "unterminated section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty() || !sections.count(section)) {
                throw ConfigError(where + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected key = value");
        }
        const std::string key = std::string(trim(line.substr(0, eq)));
        const std::string full = section.empty() ? key : section + "." + key;
        if (!entries.emplace(full, Entry{std::string(trim(line.substr(eq + 1))), line_no}).second) {
            throw ConfigError(where + "duplicate key '" + full + "'");
        }
    }

    const auto exp = entries.find("experiment");
    if (exp == entries.end()) {
        throw ConfigError("missing top-level key 'experiment'");
    }
    const auto e = parse_experiment(exp->second.value);
    if (!e) {
        throw ConfigError("line " + std::to_string(exp->second.line) + ": unknown experiment '" +
                          exp->second.value + "'");
    }
    RunConfig config = default_config(*e);
    for (const auto& [full, entry] : entries) {
        const Field* match = nullptr;
        for (const Field& f : fields()) {
            if ((f.section.empty() ? f.key : f.section + "." + f.key) == full) {
                match = &f;
                break;
            }
        }
        if (!match) {
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + full + "'");
        }
        try {
            match->set(config, entry.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(entry.line) + ": " + full + ": " + err.what());
        }
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const RunConfig& config)
{
    std::string out;
    std::string section;
    for (const Field& f : fields()) {
        if (f.section != section) {
            section = f.section;
            out += "\n[" + section + "]\n";
        }
        out += f.key + " = " + f.get(config) + "\n";
    }
    return out;
}

} // namespace oseen::cli
