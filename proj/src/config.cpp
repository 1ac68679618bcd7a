#include "morl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace morl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::parse_string(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw DataError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw DataError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void KvConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string KvConfig::get_string(const std::string& key, const std::string& def) const {
    return get(key).value_or(def);
}

double KvConfig::get_double(const std::string& key, double def) const {
    auto v = get(key);
    if (!v) return def;
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw DataError("config: '" + key + "' is not a number: " + *v);
    }
}

long KvConfig::get_long(const std::string& key, long def) const {
    auto v = get(key);
    if (!v) return def;
    try {
        return std::stol(*v);
    } catch (const std::exception&) {
        throw DataError("config: '" + key + "' is not an integer: " + *v);
    }
}

bool KvConfig::get_bool(const std::string& key, bool def) const {
    auto v = get(key);
    if (!v) return def;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw DataError("config: '" + key + "' is not a boolean: " + *v);
}

std::vector<int> KvConfig::get_int_list(const std::string& key, std::vector<int> def) const {
    auto v = get(key);
    if (!v) return def;
    std::vector<int> out;
    std::istringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw DataError("config: '" + key + "' has a non-integer item: " + item);
        }
    }
    return out;
}

const std::vector<std::string>& valid_methods() {
    static const std::vector<std::string> methods = {
        "gpi-ls-month",     "gpi-pd-month",     "finetune-gpi-ls", "finetune-gpi-pd",
        "gpi-ls-year",      "gpi-pd-year",      "joint-gpi-ls",    "joint-gpi-pd",
        "r-gpi-ls",         "r-gpi-pd",         "finetune-r-gpi-ls",
        "finetune-r-gpi-pd", "rule1",           "rule2"};
    return methods;
}

MethodInfo method_info(const std::string& name) {
    if (name == "rule1") return {MethodKind::Rule1, Variant::LS, false};
    if (name == "rule2") return {MethodKind::Rule2, Variant::LS, false};
    if (name == "gpi-ls-month") return {MethodKind::Month, Variant::LS, false};
    if (name == "gpi-pd-month") return {MethodKind::Month, Variant::PD, false};
    if (name == "finetune-gpi-ls") return {MethodKind::FinetuneMonth, Variant::LS, true};
    if (name == "finetune-gpi-pd") return {MethodKind::FinetuneMonth, Variant::PD, true};
    if (name == "gpi-ls-year") return {MethodKind::Year, Variant::LS, false};
    if (name == "gpi-pd-year") return {MethodKind::Year, Variant::PD, false};
    if (name == "joint-gpi-ls") return {MethodKind::Joint, Variant::LS, true};
    if (name == "joint-gpi-pd") return {MethodKind::Joint, Variant::PD, true};
    if (name == "r-gpi-ls") return {MethodKind::RGpi, Variant::LS, true};
    if (name == "r-gpi-pd") return {MethodKind::RGpi, Variant::PD, true};
    if (name == "finetune-r-gpi-ls") return {MethodKind::FinetuneRGpi, Variant::LS, true};
    if (name == "finetune-r-gpi-pd") return {MethodKind::FinetuneRGpi, Variant::PD, true};
    std::string all;
    for (const auto& m : valid_methods()) all += (all.empty() ? "" : ", ") + m;
    throw std::invalid_argument("unknown method '" + name + "'; expected one of: " + all);
}

std::vector<Regime> parse_regimes(const std::string& text) {
    std::vector<Regime> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        Regime r;
        std::istringstream rs(item);
        std::string f;
        try {
            if (!std::getline(rs, f, ':')) throw std::invalid_argument("");
            r.start_day = std::stoi(trim(f));
            if (!std::getline(rs, f, ':')) throw std::invalid_argument("");
            r.solar_scale = std::stod(trim(f));
            if (std::getline(rs, f, ':')) r.noise = std::stod(trim(f));
        } catch (const std::exception&) {
            throw DataError("bad regime spec item '" + item + "' (want start:scale[:noise])");
        }
        out.push_back(r);
    }
    if (out.empty()) throw DataError("empty regime spec");
    return out;
}

std::pair<std::uint64_t, std::vector<Regime>> parse_synth_spec(const std::string& text) {
    const std::size_t semi = text.find(';');
    if (semi == std::string::npos) return {7, parse_regimes(text)};
    std::uint64_t seed = 7;
    try {
        seed = std::stoull(trim(text.substr(0, semi)));
    } catch (const std::exception&) {
        throw DataError("bad synth spec seed in '" + text + "'");
    }
    return {seed, parse_regimes(text.substr(semi + 1))};
}

RunConfig RunConfig::from_kv(const KvConfig& kv) {
    RunConfig c;
    c.method = kv.get_string("run.method", c.method);
    c.out_dir = kv.get_string("run.out", c.out_dir);
    c.dataset_path = kv.get_string("run.dataset", c.dataset_path);
    c.eval_weights = static_cast<int>(kv.get_long("run.eval_weights", c.eval_weights));
    if (auto s = kv.get("run.seeds")) {
        c.seeds.clear();
        std::istringstream ss(*s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!trim(item).empty()) c.seeds.push_back(std::stoull(trim(item)));
        if (c.seeds.empty()) throw DataError("config: run.seeds is empty");
    }
    c.synth_seed = static_cast<std::uint64_t>(kv.get_long("run.synth_seed",
                                                          static_cast<long>(c.synth_seed)));
    if (auto hv = kv.get("run.hv_ref")) {
        std::istringstream ss(*hv);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw DataError("config: run.hv_ref wants two comma-separated numbers");
        c.hv_ref = {std::stod(a), std::stod(b)};
    }
    if (auto r = kv.get("run.synth_regimes")) c.synth_regimes = parse_regimes(*r);

    c.env.appliance_kw = kv.get_double("env.appliance_kw", c.env.appliance_kw);
    c.env.task_hours = static_cast<int>(kv.get_long("env.task_hours", c.env.task_hours));
    c.env.comfort_begin = static_cast<int>(kv.get_long("env.comfort_begin", c.env.comfort_begin));
    c.env.comfort_end = static_cast<int>(kv.get_long("env.comfort_end", c.env.comfort_end));
    c.env.peak_rate = kv.get_double("env.peak_rate", c.env.peak_rate);
    c.env.offpeak_rate = kv.get_double("env.offpeak_rate", c.env.offpeak_rate);
    c.env.gamma = kv.get_double("env.gamma", c.env.gamma);
    const std::string scope = kv.get_string("env.bill_scope", "household");
    if (scope == "household")
        c.env.bill_scope = BillScope::Household;
    else if (scope == "appliance")
        c.env.bill_scope = BillScope::Appliance;
    else
        throw DataError("config: env.bill_scope must be household or appliance");

    c.agent.hidden = kv.get_int_list("agent.hidden", c.agent.hidden);
    c.agent.lr = kv.get_double("agent.lr", c.agent.lr);
    c.agent.batch_size = static_cast<int>(kv.get_long("agent.batch", c.agent.batch_size));
    c.agent.replay_capacity = static_cast<std::size_t>(
        kv.get_long("agent.replay_capacity", static_cast<long>(c.agent.replay_capacity)));
    c.agent.target_update =
        static_cast<int>(kv.get_long("agent.target_update", c.agent.target_update));
    c.agent.eps_start = kv.get_double("agent.eps_start", c.agent.eps_start);
    c.agent.eps_end = kv.get_double("agent.eps_end", c.agent.eps_end);
    c.agent.eps_fraction = kv.get_double("agent.eps_fraction", c.agent.eps_fraction);
    c.agent.weight_hold_steps =
        static_cast<int>(kv.get_long("agent.weight_hold_steps", c.agent.weight_hold_steps));
    c.agent.max_support = static_cast<int>(kv.get_long("agent.max_support", c.agent.max_support));
    c.agent.uniform_weight_frac =
        kv.get_double("agent.uniform_weight_frac", c.agent.uniform_weight_frac);
    c.agent.learning_starts =
        static_cast<int>(kv.get_long("agent.learning_starts", c.agent.learning_starts));
    c.agent.front_eval_episodes = static_cast<int>(
        kv.get_long("agent.front_eval_episodes", c.agent.front_eval_episodes));

    c.dyna.ensemble_size = static_cast<int>(kv.get_long("dyna.ensemble", c.dyna.ensemble_size));
    c.dyna.horizon = static_cast<int>(kv.get_long("dyna.horizon", c.dyna.horizon));
    c.dyna.n_rollouts = static_cast<int>(kv.get_long("dyna.rollouts", c.dyna.n_rollouts));
    c.dyna.synth_cap = kv.get_double("dyna.synth_cap", c.dyna.synth_cap);
    c.dyna.gate_mse = kv.get_double("dyna.gate_mse", c.dyna.gate_mse);
    c.dyna.hidden = kv.get_int_list("dyna.hidden", c.dyna.hidden);
    c.dyna.lr = kv.get_double("dyna.lr", c.dyna.lr);
    c.dyna.train_every = static_cast<int>(kv.get_long("dyna.train_every", c.dyna.train_every));
    c.dyna.train_iters = static_cast<int>(kv.get_long("dyna.train_iters", c.dyna.train_iters));
    c.dyna.model_batch = static_cast<int>(kv.get_long("dyna.model_batch", c.dyna.model_batch));
    c.dyna.imagine_every =
        static_cast<int>(kv.get_long("dyna.imagine_every", c.dyna.imagine_every));

    c.meta.outer_lr = kv.get_double("meta.outer_lr", c.meta.outer_lr);
    c.meta.n_epochs = static_cast<int>(kv.get_long("meta.epochs", c.meta.n_epochs));
    c.meta.inner_steps = static_cast<int>(kv.get_long("meta.inner_steps", c.meta.inner_steps));
    c.meta.contexts_per_epoch =
        static_cast<int>(kv.get_long("meta.contexts_per_epoch", c.meta.contexts_per_epoch));
    c.meta.finetune_steps =
        static_cast<int>(kv.get_long("meta.finetune_steps", c.meta.finetune_steps));
    c.meta.finetune_lr = kv.get_double("meta.finetune_lr", c.meta.finetune_lr);
    c.meta.finetune_eps_start =
        kv.get_double("meta.finetune_eps_start", c.meta.finetune_eps_start);
    c.meta.subwindow_hours =
        static_cast<int>(kv.get_long("meta.subwindow_hours", c.meta.subwindow_hours));
    c.meta.batch_average = kv.get_bool("meta.batch_average", c.meta.batch_average);

    c.baseline.plain_steps = kv.get_long("baseline.plain_steps", c.baseline.plain_steps);
    c.baseline.finetune_extra =
        kv.get_long("baseline.finetune_extra", c.baseline.finetune_extra);

    c.detect.encoder = kv.get_int_list("detect.encoder", c.detect.encoder);
    c.detect.epochs = static_cast<int>(kv.get_long("detect.epochs", c.detect.epochs));
    c.detect.lr = kv.get_double("detect.lr", c.detect.lr);
    c.detect.rolling = static_cast<int>(kv.get_long("detect.rolling", c.detect.rolling));
    c.detect.refractory = static_cast<int>(kv.get_long("detect.refractory", c.detect.refractory));
    c.detect.seed =
        static_cast<std::uint64_t>(kv.get_long("detect.seed", static_cast<long>(c.detect.seed)));
    return c;
}

}  // namespace morl
