#include "morl/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace morl {

double tariff_rate(const EnvConfig& cfg, int hour) {
    if (hour < 0 || hour > 23) throw std::invalid_argument("tariff_rate: hour out of range");
    return (hour >= cfg.peak_begin && hour < cfg.peak_end) ? cfg.peak_rate : cfg.offpeak_rate;
}

Dataset::Dataset(std::vector<HourlyRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw DataError("dataset: no records");
    if (records_.size() % 24 != 0)
        throw DataError("dataset: record count is not a multiple of 24");
    first_day_ = records_.front().day;
    num_days_ = static_cast<int>(records_.size()) / 24;
    for (int d = 0; d < num_days_; ++d) {
        for (int h = 0; h < 24; ++h) {
            const HourlyRecord& r = records_[static_cast<std::size_t>(d) * 24 + h];
            if (r.day != first_day_ + d || r.hour != h) {
                std::ostringstream msg;
                msg << "dataset: day " << first_day_ + d << " is missing or misordered at hour "
                    << h << " (found day " << r.day << " hour " << r.hour << ")";
                throw DataError(msg.str());
            }
            if (r.background_demand_kw < 0 || r.renewable_kw < 0 ||
                !std::isfinite(r.background_demand_kw) || !std::isfinite(r.renewable_kw))
                throw DataError("dataset: negative or non-finite power value on day " +
                                std::to_string(r.day));
            max_demand_ = std::max(max_demand_, r.background_demand_kw);
            max_renewable_ = std::max(max_renewable_, r.renewable_kw);
        }
    }
}

const HourlyRecord& Dataset::at(int day, int hour) const {
    if (!has_day(day))
        throw DataError("dataset: day " + std::to_string(day) + " not present");
    if (hour < 0 || hour > 23) throw std::invalid_argument("dataset: hour out of range");
    return records_[static_cast<std::size_t>(day - first_day_) * 24 + hour];
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset is empty: " + path);
    // tolerate a UTF-8 BOM and trailing CR
    if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "day,hour,background_demand_kw,renewable_kw")
        throw DataError("dataset header mismatch in " + path + ": got '" + line + "'");

    std::vector<HourlyRecord> records;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        HourlyRecord r;
        try {
            std::size_t pos = 0;
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("missing field");
            r.day = std::stoi(field, &pos);
            if (pos != field.size()) throw std::invalid_argument("trailing junk");
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("missing field");
            r.hour = std::stoi(field, &pos);
            if (pos != field.size()) throw std::invalid_argument("trailing junk");
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("missing field");
            r.background_demand_kw = std::stod(field, &pos);
            if (pos != field.size()) throw std::invalid_argument("trailing junk");
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("missing field");
            r.renewable_kw = std::stod(field, &pos);
            if (pos != field.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw DataError("dataset parse error at row " + std::to_string(row) + " of " + path);
        }
        records.push_back(r);
    }
    return Dataset(std::move(records));
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "day,hour,background_demand_kw,renewable_kw\n";
    out.precision(17);
    for (const HourlyRecord& r : data.records())
        out << r.day << ',' << r.hour << ',' << r.background_demand_kw << ','
            << r.renewable_kw << '\n';
}

Dataset synth_year(std::uint64_t seed, const std::vector<Regime>& regimes) {
    if (regimes.empty()) throw std::invalid_argument("synth_year: no regimes");
    if (regimes.front().start_day != 1)
        throw std::invalid_argument("synth_year: first regime must start on day 1");
    for (std::size_t i = 1; i < regimes.size(); ++i)
        if (regimes[i].start_day <= regimes[i - 1].start_day)
            throw std::invalid_argument("synth_year: regime start days must be increasing");
    if (regimes.back().start_day > 365)
        throw std::invalid_argument("synth_year: regime start beyond day 365");

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<HourlyRecord> records;
    records.reserve(365 * 24);
    std::size_t regime_idx = 0;
    for (int day = 1; day <= 365; ++day) {
        while (regime_idx + 1 < regimes.size() && regimes[regime_idx + 1].start_day <= day)
            ++regime_idx;
        const Regime& reg = regimes[regime_idx];
        for (int hour = 0; hour < 24; ++hour) {
            HourlyRecord r;
            r.day = day;
            r.hour = hour;
            // solar bell peaking at noon, sigma 3h
            const double bell = std::exp(-((hour - 12.0) * (hour - 12.0)) / (2.0 * 9.0));
            // two-peak diurnal demand profile around 8h and 19h
            const double base =
                0.2 + 0.25 * std::exp(-((hour - 8.0) * (hour - 8.0)) / 10.0) +
                0.35 * std::exp(-((hour - 19.0) * (hour - 19.0)) / 8.0);
            const double rn = reg.noise > 0.0 ? gauss(rng) * reg.noise : 0.0;
            const double dn = reg.noise > 0.0 ? gauss(rng) * reg.noise : 0.0;
            r.renewable_kw = std::max(0.0, reg.solar_scale * bell + rn);
            r.background_demand_kw = std::max(0.0, base + dn);
            records.push_back(r);
        }
    }
    return Dataset(std::move(records));
}

EnvState env_reset(const Dataset& data, const EnvConfig& cfg, int day) {
    const HourlyRecord& r = data.at(day, 0);
    EnvState s;
    s.background_demand_kw = r.background_demand_kw;
    s.hour = 0;
    s.remaining_task_hours = cfg.task_hours;
    s.renewable_kw = r.renewable_kw;
    return s;
}

Transition env_step(const Dataset& data, const EnvConfig& cfg, const EnvState& state,
                    int action, int day) {
    if (action != 0 && action != 1) throw std::invalid_argument("env_step: action must be 0 or 1");
    if (state.hour < 0 || state.hour > 23)
        throw std::invalid_argument("env_step: state hour out of range");

    const double appliance_draw = action == 1 ? cfg.appliance_kw : 0.0;
    const double load = cfg.bill_scope == BillScope::Household
                            ? state.background_demand_kw + appliance_draw
                            : appliance_draw;
    const double net_draw = std::max(0.0, load - state.renewable_kw);

    Transition tr;
    tr.state = state;
    tr.action = action;
    tr.reward.neg_cost = -net_draw * tariff_rate(cfg, state.hour);
    const bool in_window = state.hour >= cfg.comfort_begin && state.hour < cfg.comfort_end;
    tr.reward.comfort =
        (action == 1 && in_window && state.remaining_task_hours > 0) ? 1.0 : 0.0;

    int remaining = state.remaining_task_hours;
    if (action == 1 && remaining > 0) --remaining;

    tr.done = state.hour == 23;
    const int next_hour = tr.done ? 0 : state.hour + 1;
    const HourlyRecord& nr = data.at(day, next_hour);
    tr.next_state.background_demand_kw = nr.background_demand_kw;
    tr.next_state.hour = next_hour;
    tr.next_state.remaining_task_hours = remaining;
    tr.next_state.renewable_kw = nr.renewable_kw;
    return tr;
}

int rule_policy(int rule, const EnvState& state) {
    if (rule == 1) return (state.hour >= 0 && state.hour < 4) ? 1 : 0;
    if (rule == 2) return (state.hour >= 4 && state.hour < 8) ? 1 : 0;
    throw std::invalid_argument("rule_policy: rule must be 1 or 2");
}

}  // namespace morl
