#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tls/control.hpp"
#include "tls/scenario.hpp"
#include "tls/wire.hpp"

namespace {

struct CliConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

tls::ExperimentSpec spec_from_flags(const std::string& config_path,
                                    const std::string& plan, long long interval,
                                    long long seed) {
    tls::ExperimentSpec spec = tls::load_spec(config_path);
    if (!plan.empty()) spec.plan = tls::plan_variant_from_string(plan);
    if (interval > 0) spec.demand.insertion_interval = interval;
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    tls::validate_spec(spec);
    return spec;
}

int cmd_gen(const std::string& config, const std::string& out) {
    tls::ExperimentSpec spec = tls::load_spec(config);
    tls::RoadNetwork net = tls::build_network(spec);
    auto demand = tls::generate_demand(spec, net);
    tls::write_demand_csv(demand, out);
    std::printf("junctions=%zu links=%zu signalized=%zu vehicles=%zu horizon=%lld\n",
                net.junction_count(), net.link_count(), net.signalized_ids().size(),
                demand.size(), tls::horizon_steps(spec));
    return 0;
}

int cmd_run(const std::string& config, const std::string& plan, long long interval,
            long long seed, const std::string& out, const std::string& demand_path) {
    tls::ExperimentSpec spec = spec_from_flags(config, plan, interval, seed);
    std::vector<tls::DemandEntry> demand;
    if (!demand_path.empty()) demand = tls::read_demand_csv(demand_path);
    else demand = tls::generate_demand(spec, tls::build_network(spec));
    tls::RunResult result = tls::run_experiment(spec, demand);
    tls::write_run_outputs(result, out);
    std::printf("%s interval=%lld seed=%llu vehicles=%zu unfinished=%zu "
                "mean_travel=%.2f mean_wait=%.2f\n",
                result.aggregate.plan.c_str(), result.aggregate.interval,
                static_cast<unsigned long long>(result.aggregate.seed),
                result.aggregate.vehicles, result.aggregate.unfinished,
                result.aggregate.mean_travel, result.aggregate.mean_wait);
    return 0;
}

int cmd_matrix(const std::string& config, const std::string& out,
               std::vector<long long> intervals, long long seed, int jobs) {
    tls::ExperimentSpec base = tls::load_spec(config);
    if (seed >= 0) base.seed = static_cast<std::uint64_t>(seed);
    if (intervals.empty()) intervals = {7000, 10000};
    const std::vector<tls::PlanVariant> plans = {
        tls::PlanVariant::Fixed, tls::PlanVariant::SemiFixed,
        tls::PlanVariant::QLearningA, tls::PlanVariant::QLearningB};

    struct Job {
        tls::ExperimentSpec spec;
        std::vector<tls::DemandEntry> demand;
        tls::RunResult result;
    };
    std::vector<Job> runs;
    for (long long interval : intervals) {
        tls::ExperimentSpec s = base;
        s.demand.insertion_interval = interval;
        auto demand = tls::generate_demand(s, tls::build_network(s));
        for (tls::PlanVariant plan : plans) {
            Job job;
            job.spec = s;
            job.spec.plan = plan;
            job.demand = demand;
            runs.push_back(std::move(job));
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= runs.size()) break;
            runs[i].result = tls::run_experiment(runs[i].spec, runs[i].demand);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<tls::RunAggregate> rows;
    for (auto& job : runs) {
        const std::string dir = out + "/" + job.result.aggregate.plan + "_" +
                                std::to_string(job.result.aggregate.interval);
        tls::write_run_outputs(job.result, dir);
        rows.push_back(job.result.aggregate);
    }
    std::filesystem::create_directories(out);
    tls::export_aggregate_csv(rows, out + "/matrix.csv");
    std::printf("wrote %zu runs to %s\n", rows.size(), out.c_str());
    return 0;
}

int cmd_serve(const std::string& config, const std::string& listen) {
    tls::ExperimentSpec spec = tls::load_spec(config);
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos)
        throw CliConfigError("--listen expects host:port");
    const std::string host = listen.substr(0, colon);
    const int port = std::stoi(listen.substr(colon + 1));
    if (port < 0 || port > 65535) throw CliConfigError("port out of range");

    tls::RoadNetwork net = tls::build_network(spec);
    std::map<std::string, tls::SemaphorePlan> plans;
    for (const auto& jid : net.signalized_ids())
        plans.emplace(jid, tls::default_two_green_plan(net, jid, spec.initial_greens[0],
                                                       spec.initial_greens[1]));
    tls::SimParams params;
    params.steps_per_hour = spec.steps_per_hour;
    params.vicinity_m = spec.vicinity_m;
    tls::Engine engine(std::move(net), std::move(plans), params);
    for (const auto& e : tls::generate_demand(spec, engine.network()))
        engine.schedule_vehicle(e.id, e.route, e.depart_step);

    tls::MessageBus bus;
    tls::ControlApi api(engine);
    api.attach_bus(&bus);
    api.attach_schedule(&spec.schedule);
    tls::WireServer server(api, host, static_cast<std::uint16_t>(port));
    server.start();
    std::printf("listening on %s:%u\n", host.c_str(), server.port());
    std::fflush(stdout);
    server.wait_controlling_closed();
    server.stop();
    return 0;
}

int cmd_report(const std::string& in) {
    std::vector<std::string> files;
    const std::string matrix = in + "/matrix.csv";
    if (std::filesystem::exists(matrix)) {
        files.push_back(matrix);
    } else {
        for (const auto& entry : std::filesystem::recursive_directory_iterator(in))
            if (entry.path().filename() == "aggregate.csv")
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw CliConfigError("no aggregate CSVs under " + in);

    std::printf("%-10s %8s %6s %8s %10s %12s %12s %12s %12s\n", "plan", "interval",
                "seed", "vehicles", "unfinished", "mean_travel", "std_travel",
                "mean_wait", "std_wait");
    for (const auto& f : files) {
        std::ifstream csv(f);
        std::string line;
        std::getline(csv, line);  // header
        while (std::getline(csv, line)) {
            std::istringstream ss(line);
            std::vector<std::string> cols;
            std::string c;
            while (std::getline(ss, c, ',')) cols.push_back(c);
            if (cols.size() != 9) continue;
            std::printf("%-10s %8s %6s %8s %10s %12.2f %12.2f %12.2f %12.2f\n",
                        cols[0].c_str(), cols[1].c_str(), cols[2].c_str(),
                        cols[3].c_str(), cols[4].c_str(), std::stod(cols[5]),
                        std::stod(cols[6]), std::stod(cols[7]), std::stod(cols[8]));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent traffic-light control simulator"};
    app.require_subcommand(1);

    std::string config, out, plan, demand_path, listen = "127.0.0.1:7711", in_dir;
    long long interval = 0, seed = -1;
    std::vector<long long> intervals;
    int jobs = 1;

    auto* gen = app.add_subcommand("gen", "generate network and demand file");
    gen->add_option("--config", config)->required();
    gen->add_option("--out", out)->required();

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--config", config)->required();
    run->add_option("--plan", plan)->check(CLI::IsMember({"fixed", "semifixed", "qa", "qb"}));
    run->add_option("--interval", interval);
    run->add_option("--seed", seed);
    run->add_option("--out", out)->required();
    run->add_option("--demand", demand_path);

    auto* matrix = app.add_subcommand("matrix", "run the plan x interval comparison");
    matrix->add_option("--config", config)->required();
    matrix->add_option("--out", out)->required();
    matrix->add_option("--intervals", intervals);
    matrix->add_option("--seed", seed);
    matrix->add_option("--jobs", jobs);

    auto* serve = app.add_subcommand("serve", "serve the wire control protocol");
    serve->add_option("--config", config)->required();
    serve->add_option("--listen", listen);

    auto* report = app.add_subcommand("report", "print aggregate tables");
    report->add_option("--in", in_dir)->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(config, out);
        if (run->parsed()) return cmd_run(config, plan, interval, seed, out, demand_path);
        if (matrix->parsed()) return cmd_matrix(config, out, intervals, seed, jobs);
        if (serve->parsed()) return cmd_serve(config, listen);
        if (report->parsed()) return cmd_report(in_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const tls::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CliConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
