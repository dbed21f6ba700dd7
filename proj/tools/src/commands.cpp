#include "commands.hpp"

#include "oseen/experiments.hpp"
#include "oseen/io.hpp"
#include "oseen/property_suite.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace oseen::cli {

namespace fs = std::filesystem;

namespace {

class RunLog {
public:
    explicit RunLog(const RunConfig& config) : dir_(config.out)
    {
        fs::create_directories(dir_);
        text_ << "# oseen-stab " << to_string(config.experiment) << "\n# config\n" << serialize_config(config)
              << "\n";
    }

    std::ostringstream& stream() { return text_; }

    void write(std::string_view name, std::string_view content)
    {
        write_file_atomic(dir_ / name, content);
        text_ << "wrote " << (dir_ / name).string() << '\n';
    }

    ~RunLog()
    {
        try {
            write_file_atomic(dir_ / "run.log", text_.str());
        } catch (...) {
            // Nothing sensible to do while unwinding.
        }
    }

private:
    fs::path dir_;
    std::ostringstream text_;
};

SolveSettings settings_for(const RunConfig& config, std::ostringstream& sink)
{
    SolveSettings s;
    s.linear = config.solver;
    s.assembly.exactness = config.exactness;
    s.assembly.threads = config.experiment == Experiment::Kovasznay ? 1 : config.threads;
    s.warn = [&sink](std::string_view msg) { sink << "warning: " << msg << '\n'; };
    return s;
}

std::string tau_line(const std::string& where, const PropertyResult& r)
{
    return std::string("tau_bounds ") + (r.passed ? "ok " : "VIOLATED ") + where + " " + r.detail + "\n";
}

std::string sigma_line(const std::string& where, const SigmaCondition& s, const PhysParams& p)
{
    std::ostringstream out;
    out << "sigma_condition " << where << " satisfied=" << (s.satisfied ? "true" : "false")
        << " sigma=" << format_double(p.sigma) << " four_rho_grad=" << format_double(4.0 * p.rho * s.grad_norm)
        << " margin=" << format_double(s.margin) << '\n';
    return out.str();
}

std::string mu_tag(double mu)
{
    std::ostringstream out;
    out << mu;
    return out.str();
}

struct KovasznayTask {
    double mu = 1.0;
    bool nonlinear = false;
    std::string file;
    std::string log;
    std::string csv;
    bool solver_failed = false;
    bool picard_failed = false;
    bool tau_failed = false;
};

void run_kovasznay_task(const RunConfig& config, KovasznayTask& task)
{
    std::ostringstream log;
    log << "[" << task.file << "]\n";
    const auto& kc = config.kovasznay;
    ManufacturedCase c = make_kovasznay_case(task.mu, config.params.rho, config.params.sigma, kc.zeta,
                                             task.nonlinear ? 1.0 : kc.a_scale);
    c.params.lambda = config.params.lambda;
    c.params.delta = config.params.delta;
    log << "zeta_variant=" << to_string(kc.zeta) << " zeta=" << format_double(kovasznay_zeta(task.mu, kc.zeta))
        << '\n';

    StudyOptions opts;
    opts.base_cells = kc.base_cells;
    opts.pattern = kc.pattern;
    opts.settings = settings_for(config, log);
    opts.picard = config.picard;

    for (int level = 0; level < config.levels; ++level) {
        const int n = kc.base_cells << level;
        const TriMesh mesh = build_rect_tri_mesh(c.domain, n, n, kc.pattern);
        const PropertyResult tau = check_tau_bounds(mesh, c.params);
        task.tau_failed = task.tau_failed || !tau.passed;
        log << tau_line("level=" + std::to_string(level), tau);
    }

    ConvergenceRecord record;
    try {
        record = run_convergence_study(c, config.degree, config.levels, task.nonlinear, opts);
    } catch (const StudyFailure& e) {
        record = e.partial();
        task.solver_failed = true;
        log << "solver failure: " << e.what() << '\n';
    } catch (const SolverFailure& e) {
        task.solver_failed = true;
        log << "solver failure: " << e.what() << '\n';
    }
    for (const auto& lvl : record.levels) {
        log << lvl.report.to_key_value("level" + std::to_string(lvl.level) + ".");
        if (task.nonlinear && !lvl.report.converged) {
            task.picard_failed = true;
            log << "warning: Picard did not converge at level " << lvl.level << '\n';
        }
    }
    task.csv = record.to_csv();
    task.log = log.str();
}

} // namespace

int cmd_kovasznay(const RunConfig& config, std::ostream& console)
{
    RunLog run(config);
    std::vector<KovasznayTask> tasks;
    for (const double mu : config.kovasznay.mu_values) {
        for (const bool nonlinear : {false, true}) {
            if ((nonlinear && !config.kovasznay.nonlinear) || (!nonlinear && !config.kovasznay.linear)) {
                continue;
            }
            KovasznayTask t;
            t.mu = mu;
            t.nonlinear = nonlinear;
            t.file = "kovasznay_k" + std::to_string(config.degree) + "_mu" + mu_tag(mu) +
                     (nonlinear ? "_nonlinear" : "_linear") + ".csv";
            tasks.push_back(std::move(t));
        }
    }

    // Tasks are independent; results are merged in task order.
    std::size_t next = 0;
    std::mutex lock;
    auto worker = [&] {
        for (;;) {
            std::size_t i = 0;
            {
                const std::lock_guard<std::mutex> guard(lock);
                if (next >= tasks.size()) {
                    return;
                }
                i = next++;
                console << "kovasznay: " << tasks[i].file << '\n' << std::flush;
            }
            run_kovasznay_task(config, tasks[i]);
        }
    };
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(config.threads), tasks.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }

    int code = kExitOk;
    for (const auto& t : tasks) {
        run.stream() << t.log;
        run.write(t.file, t.csv);
        if (t.solver_failed || t.picard_failed) {
            code = kExitSolver;
        }
        if (t.tau_failed) {
            run.stream() << "error: tau bounds violated in " << t.file << '\n';
            code = code == kExitOk ? kExitProperty : code;
        }
    }
    console << "kovasznay: " << tasks.size() << " studies written to " << config.out << '\n';
    return code;
}

int cmd_bent_random(const RunConfig& config, std::ostream& console)
{
    RunLog run(config);
    auto& log = run.stream();
    BentRandomOptions o;
    o.channel = {config.bent_random.inner_radius, config.bent_random.outer_radius, config.bent_random.leg_length};
    o.n_across = config.bent_random.n_across;
    o.n_along = config.bent_random.n_along;
    o.max_speed = config.bent_random.max_speed;
    o.seed = config.seed;
    o.params = config.params;
    o.degree = config.degree;
    o.a_scale = config.bent_random.a_scale;
    o.settings = settings_for(config, log);

    BentRandomResult r;
    try {
        r = run_bent_random(o);
    } catch (const SolverFailure& e) {
        log << "solver failure: " << e.what() << '\n';
        console << "bent-random: solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    const PropertyResult tau = check_tau_bounds(*r.mesh, o.params);
    log << tau_line("mesh=bent", tau);
    log << sigma_line("u_m", r.sigma, o.params);
    log << r.solution.report.to_key_value("solve.");

    std::ostringstream csv;
    csv << "seed,cells,e0_w,e1_w,e0_p,e_triple,correlation,grad_u_m\n"
        << config.seed << ',' << r.mesh->num_cells() << ',' << format_double(r.errors.e0_w) << ','
        << format_double(r.errors.e1_w) << ',' << format_double(r.errors.e0_p) << ','
        << format_double(r.errors.e_triple) << ',' << format_double(r.correlation) << ','
        << format_double(r.sigma.grad_norm) << '\n';
    run.write("bent_random.csv", csv.str());
    run.write("bent_random.vtk", bent_random_vtk(r));
    console << "bent-random: cells=" << r.mesh->num_cells() << " e0(p)=" << r.errors.e0_p
            << " correlation=" << r.correlation << '\n';
    return tau.passed ? kExitOk : kExitProperty;
}

int cmd_ns_recovery(const RunConfig& config, std::ostream& console)
{
    RunLog run(config);
    auto& log = run.stream();
    const auto& nc = config.ns_recovery;
    NsRecoveryOptions o;
    o.coarse_nx = nc.coarse_nx;
    o.coarse_ny = nc.coarse_ny;
    o.mu = config.params.mu;
    o.rho = config.params.rho;
    o.sigma = config.params.sigma;
    o.flow_sigma = nc.flow_sigma;
    o.lambda = config.params.lambda;
    o.delta = config.params.delta;
    o.coarse_picard = config.picard;
    o.recovery_picard = config.picard;
    o.reference_picard = config.picard;
    o.reference_nx = nc.reference_nx;
    o.reference_ny = nc.reference_ny;
    o.viscous_datum = nc.viscous_datum;
    o.profile_samples = nc.profile_samples;
    o.settings = settings_for(config, log);

    NsRecoveryResult r;
    try {
        r = run_ns_recovery(o);
    } catch (const SolverFailure& e) {
        log << "solver failure: " << e.what() << '\n';
        console << "ns-recovery: solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    const PhysParams params{o.mu, o.rho, o.sigma, o.lambda, o.delta};
    const PropertyResult tau = check_tau_bounds(*r.mesh, params);
    log << tau_line("mesh=recovery", tau);
    log << sigma_line("grad_u_m", r.sigma_gradient, params);
    log << "sup_u_m=" << format_double(r.u_m_sup) << " four_sup_u_m=" << format_double(4.0 * r.u_m_sup) << '\n';
    log << "inlet_flux=" << format_double(r.inlet_flux) << " outlet_flux=" << format_double(r.outlet_flux) << '\n';
    log << r.coarse.report.to_key_value("coarse.") << r.recovery.report.to_key_value("recovery.")
        << r.reference.report.to_key_value("reference.");

    std::ostringstream summary;
    summary << "profile,pressure_deviation,speed_deviation\n";
    for (const auto& p : r.profiles) {
        summary << p.name << ',' << format_double(p.pressure_deviation) << ',' << format_double(p.speed_deviation)
                << '\n';
        std::string file = "profile_" + p.name + ".csv";
        std::erase(file, '=');
        run.write(file, p.to_csv());
        console << "ns-recovery: " << p.name << " pressure deviation " << p.pressure_deviation
                << ", speed deviation " << p.speed_deviation << '\n';
    }
    run.write("ns_recovery.csv", summary.str());
    run.write("ns_recovery.vtk", ns_recovery_vtk(r));
    run.write("ns_reference.vtk", ns_reference_vtk(r));

    int code = tau.passed ? kExitOk : kExitProperty;
    for (const SolveReport* rep : {&r.coarse.report, &r.recovery.report, &r.reference.report}) {
        if (!rep->converged) {
            log << "error: a Picard iteration did not converge\n";
            code = kExitSolver;
        }
    }
    return code;
}

int cmd_check(const RunConfig& config, std::ostream& console)
{
    RunLog run(config);
    PropertySuiteOptions o;
    o.degrees = config.check.degrees;
    o.mesh_sizes = config.check.mesh_sizes;
    o.params = config.params;
    o.random_vectors = config.check.random_vectors;
    o.trilinear_triples = config.check.trilinear_triples;
    o.seed = config.seed;
    const PropertyLedger ledger = run_property_suite(o);
    const std::string text = ledger.to_text();
    run.stream() << text;
    run.write("property_ledger.txt", text);
    console << text;
    return ledger.all_passed() ? kExitOk : kExitProperty;
}

int run_experiment(const RunConfig& config, std::ostream& console)
{
    const auto start = std::chrono::steady_clock::now();
    int code = kExitOk;
    switch (config.experiment) {
    case Experiment::Kovasznay: code = cmd_kovasznay(config, console); break;
    case Experiment::BentRandom: code = cmd_bent_random(config, console); break;
    case Experiment::NsRecovery: code = cmd_ns_recovery(config, console); break;
    case Experiment::Check: code = cmd_check(config, console); break;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    console << to_string(config.experiment) << ": exit " << code << " after " << seconds << " s\n";
    return code;
}

} // namespace oseen::cli
