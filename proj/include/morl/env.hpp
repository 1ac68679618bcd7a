#pragma once

#include <string>
#include <vector>

#include "morl/common.hpp"

namespace morl {

struct HourlyRecord {
    int day = 1;   // 1-based
    int hour = 0;  // 0..23
    double background_demand_kw = 0.0;
    double renewable_kw = 0.0;
};

enum class BillScope { Household, Appliance };

struct EnvConfig {
    double appliance_kw = 1.5;
    int task_hours = 4;
    int comfort_begin = 0, comfort_end = 8;   // [begin, end)
    double peak_rate = 0.3662;                // pounds/kWh, 08:00-23:00
    double offpeak_rate = 0.1518;             // pounds/kWh, 23:00-08:00
    int peak_begin = 8, peak_end = 23;        // [begin, end)
    double gamma = 0.99;
    BillScope bill_scope = BillScope::Household;
};

struct EnvState {
    double background_demand_kw = 0.0;
    int hour = 0;
    int remaining_task_hours = 0;
    double renewable_kw = 0.0;
};

struct RewardVec {
    double neg_cost = 0.0;  // -pounds for the hour
    double comfort = 0.0;   // 0 or 1
};

struct Transition {
    EnvState state;
    int action = 0;
    RewardVec reward;
    EnvState next_state;
    bool done = false;
};

double tariff_rate(const EnvConfig& cfg, int hour);

// Validated hourly table: contiguous days, 24 complete hours each.
class Dataset {
  public:
    Dataset() = default;
    explicit Dataset(std::vector<HourlyRecord> records);

    int first_day() const { return first_day_; }
    int num_days() const { return num_days_; }
    int last_day() const { return first_day_ + num_days_ - 1; }
    bool has_day(int day) const { return day >= first_day_ && day <= last_day(); }
    const HourlyRecord& at(int day, int hour) const;
    const std::vector<HourlyRecord>& records() const { return records_; }

    double max_demand() const { return max_demand_; }
    double max_renewable() const { return max_renewable_; }

  private:
    std::vector<HourlyRecord> records_;
    int first_day_ = 1;
    int num_days_ = 0;
    double max_demand_ = 0.0;
    double max_renewable_ = 0.0;
};

// CSV schema: header "day,hour,background_demand_kw,renewable_kw".
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

struct Regime {
    int start_day = 1;
    double solar_scale = 1.0;
    double noise = 0.0;  // std-dev of additive per-record noise
};

// Seeded 365-day synthetic year: renewable follows a midday bell curve scaled
// per regime, demand a fixed diurnal profile; regime start days are the
// ground-truth context shifts.
Dataset synth_year(std::uint64_t seed, const std::vector<Regime>& regimes);

EnvState env_reset(const Dataset& data, const EnvConfig& cfg, int day);
Transition env_step(const Dataset& data, const EnvConfig& cfg, const EnvState& state,
                    int action, int day);

// Rule 1 runs the appliance in hours [0,4), rule 2 in [4,8).
int rule_policy(int rule, const EnvState& state);

}  // namespace morl
