#ifndef TLS_METRICS_HPP
#define TLS_METRICS_HPP

#include <string>
#include <vector>

#include "tls/errors.hpp"

namespace tls {

struct VehicleRecord {
    std::string id;
    long long depart_step = 0;
    long long arrive_step = 0;
    long long travel_time = 0;    // arrive - depart
    long long waiting_steps = 0;  // steps spent queued
    int stop_count = 0;
    double avg_wait_per_stop = 0.0;  // waiting_steps / max(stop_count, 1)
};

enum class WaitMeasure { TotalWaiting, PerStop };

struct RunAggregate {
    std::string plan;
    long long interval = 0;
    unsigned long long seed = 0;
    std::size_t vehicles = 0;
    std::size_t unfinished = 0;
    double mean_travel = 0.0;
    double std_travel = 0.0;  // population std
    double mean_wait = 0.0;
    double std_wait = 0.0;
};

// Means and population standard deviations over completed vehicles.
RunAggregate aggregate(const std::vector<VehicleRecord>& records,
                       WaitMeasure measure = WaitMeasure::TotalWaiting);

// Header: vehicle_id,depart_step,arrive_step,travel_time,waiting_steps,stop_count,avg_wait_per_stop
// Rows ordered by (depart_step, vehicle_id).
void export_vehicle_csv(std::vector<VehicleRecord> records, const std::string& path);

// Header: plan,interval,seed,vehicles,unfinished,mean_travel,std_travel,mean_wait,std_wait
void export_aggregate_csv(const std::vector<RunAggregate>& rows, const std::string& path);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace tls

#endif
