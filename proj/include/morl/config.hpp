#pragma once

#include <map>
#include <optional>

#include "morl/context.hpp"
#include "morl/metrics.hpp"
#include "morl/reptile.hpp"

namespace morl {

// Plain-text "key = value" config with [section] headers; keys are stored as
// "section.key". '#' starts a comment.
class KvConfig {
  public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_string(const std::string& text);

    std::optional<std::string> get(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    long get_long(const std::string& key, long def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> def) const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

struct MethodInfo {
    MethodKind kind;
    Variant variant;
    bool uses_contexts;
};

const std::vector<std::string>& valid_methods();
MethodInfo method_info(const std::string& name);  // throws invalid_argument listing the enum

std::vector<Regime> parse_regimes(const std::string& text);
// "SEED;START:SCALE:NOISE,START:SCALE:NOISE,..." (seed part optional)
std::pair<std::uint64_t, std::vector<Regime>> parse_synth_spec(const std::string& text);

struct RunConfig {
    std::string method;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string out_dir = "run_out";
    std::string dataset_path;  // empty: use the synthetic generator
    std::uint64_t synth_seed = 7;
    std::vector<Regime> synth_regimes = {{1, 1.0, 0.02}, {120, 2.0, 0.02}, {240, 0.5, 0.02}};
    int eval_weights = 21;
    std::array<double, 2> hv_ref = kHvReference;

    EnvConfig env;
    AgentConfig agent;
    DynConfig dyna;
    MetaConfig meta;
    BaselineConfig baseline;
    DetectorConfig detect;

    static RunConfig from_kv(const KvConfig& kv);
};

}  // namespace morl
