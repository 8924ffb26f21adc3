#include "tls/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace tls {

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace

RunAggregate aggregate(const std::vector<VehicleRecord>& records, WaitMeasure measure) {
    if (records.empty()) throw ConfigError("aggregate over empty record set");
    std::vector<double> travel, wait;
    travel.reserve(records.size());
    wait.reserve(records.size());
    for (const auto& r : records) {
        travel.push_back(static_cast<double>(r.travel_time));
        wait.push_back(measure == WaitMeasure::TotalWaiting
                           ? static_cast<double>(r.waiting_steps)
                           : r.avg_wait_per_stop);
    }
    RunAggregate agg;
    agg.vehicles = records.size();
    auto t = mean_std(travel);
    auto w = mean_std(wait);
    agg.mean_travel = t.mean;
    agg.std_travel = t.std;
    agg.mean_wait = w.mean;
    agg.std_wait = w.std;
    return agg;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void export_vehicle_csv(std::vector<VehicleRecord> records, const std::string& path) {
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.depart_step != b.depart_step) return a.depart_step < b.depart_step;
        return a.id < b.id;
    });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "vehicle_id,depart_step,arrive_step,travel_time,waiting_steps,stop_count,avg_wait_per_stop\n";
    for (const auto& r : records)
        out << r.id << ',' << r.depart_step << ',' << r.arrive_step << ','
            << r.travel_time << ',' << r.waiting_steps << ',' << r.stop_count << ','
            << format_double(r.avg_wait_per_stop) << '\n';
}

void export_aggregate_csv(const std::vector<RunAggregate>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "plan,interval,seed,vehicles,unfinished,mean_travel,std_travel,mean_wait,std_wait\n";
    for (const auto& a : rows)
        out << a.plan << ',' << a.interval << ',' << a.seed << ',' << a.vehicles << ','
            << a.unfinished << ',' << format_double(a.mean_travel) << ','
            << format_double(a.std_travel) << ',' << format_double(a.mean_wait) << ','
            << format_double(a.std_wait) << '\n';
}

}  // namespace tls
