#include "morl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "morl/csv.hpp"
#include "morl/svg.hpp"

namespace fs = std::filesystem;

namespace morl {

Dataset resolve_dataset(const RunConfig& cfg) {
    if (!cfg.dataset_path.empty()) return load_dataset(cfg.dataset_path);
    return synth_year(cfg.synth_seed, cfg.synth_regimes);
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (int x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
    return out;
}

std::string kind_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::Rule1: return "rule1";
        case MethodKind::Rule2: return "rule2";
        case MethodKind::Month: return "month";
        case MethodKind::FinetuneMonth: return "finetune-month";
        case MethodKind::Year: return "year";
        case MethodKind::Joint: return "joint";
        case MethodKind::RGpi: return "r-gpi";
        case MethodKind::FinetuneRGpi: return "finetune-r-gpi";
    }
    return "?";
}

void write_solution_csv(const std::string& path, const SolutionSet& set) {
    CsvWriter w(path, "policy_id,v_0,v_1");
    for (const Solution& s : set)
        w.row({std::to_string(s.policy_id), CsvWriter::num(s.value[0]),
               CsvWriter::num(s.value[1])});
}

void write_reward_log(const std::string& path, const std::vector<DayLogRow>& log) {
    CsvWriter w(path, "day,neg_cost,comfort,context_id,finetuned_flag");
    for (const DayLogRow& r : log)
        w.row({std::to_string(r.day), CsvWriter::num(r.neg_cost), CsvWriter::num(r.comfort),
               std::to_string(r.context_id), std::to_string(r.finetuned)});
}

}  // namespace

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open manifest for writing: " + path);
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

DetectResult cmd_detect(const RunConfig& cfg, const Dataset& data,
                        const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto windows = make_windows(data);
    DetectResult res = detect(windows, cfg.detect);
    const auto segments =
        segments_from_starts(res.context_starts, data.first_day(), data.last_day());

    CsvWriter ctx(out_dir + "/contexts.csv", "context_id,start_day,end_day");
    for (const ContextSegment& s : segments)
        ctx.row({std::to_string(s.id), std::to_string(s.start_day),
                 std::to_string(s.end_day)});

    CsvWriter losses(out_dir + "/losses.csv", "day,loss,threshold");
    for (std::size_t i = 0; i < windows.size(); ++i)
        losses.row({std::to_string(windows[i].day), CsvWriter::num(res.losses[i]),
                    std::isfinite(res.thresholds[i]) ? CsvWriter::num(res.thresholds[i])
                                                     : std::string("-inf")});

    SvgFigure fig(760, 420, "Reconstruction loss and detection threshold", "day", "loss");
    std::vector<double> days, ls, ths;
    std::vector<double> tdays;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        days.push_back(windows[i].day);
        ls.push_back(res.losses[i]);
        if (std::isfinite(res.thresholds[i])) {
            tdays.push_back(windows[i].day);
            ths.push_back(res.thresholds[i]);
        }
    }
    fig.polyline(days, ls, SvgFigure::palette()[0], "loss");
    fig.polyline(tdays, ths, SvgFigure::palette()[1], "threshold");
    for (int day : res.context_starts) fig.vline(day, SvgFigure::palette()[3]);
    fig.save(out_dir + "/losses.svg");
    return res;
}

AnnualResult run_method_once(const RunConfig& cfg, const MethodInfo& info,
                             const Dataset& data, const std::vector<int>& context_starts,
                             std::uint64_t seed) {
    switch (info.kind) {
        case MethodKind::Rule1:
            return rule_run(1, data, cfg.env, cfg.hv_ref);
        case MethodKind::Rule2:
            return rule_run(2, data, cfg.env, cfg.hv_ref);
        case MethodKind::Month:
        case MethodKind::FinetuneMonth:
        case MethodKind::Year:
        case MethodKind::Joint:
            return baseline_run(info.kind, info.variant, data, cfg.env, context_starts,
                                cfg.agent, cfg.dyna, cfg.baseline, cfg.eval_weights, seed,
                                cfg.hv_ref);
        case MethodKind::RGpi:
        case MethodKind::FinetuneRGpi: {
            MetaResult meta = meta_train(data, cfg.env, context_starts, info.variant,
                                         cfg.agent, cfg.dyna, cfg.meta, seed);
            MetaConfig mcfg = cfg.meta;
            if (info.kind == MethodKind::RGpi) mcfg.finetune_steps = 0;
            AnnualResult res =
                finetune_run_year(meta.phi, data, cfg.env, context_starts, info.variant,
                                  cfg.agent, cfg.dyna, mcfg, cfg.eval_weights, seed,
                                  cfg.hv_ref);
            res.training_budget += meta.training_budget;
            res.final_params = std::move(meta.phi);
            return res;
        }
    }
    throw std::invalid_argument("run_method_once: unhandled method kind");
}

RunOutcome cmd_run(const RunConfig& cfg) {
    const MethodInfo info = method_info(cfg.method);
    const Dataset data = resolve_dataset(cfg);
    fs::create_directories(cfg.out_dir);

    RunOutcome outcome;
    outcome.method = cfg.method;
    if (info.uses_contexts) {
        DetectResult det = cmd_detect(cfg, data, cfg.out_dir);
        outcome.context_starts = det.context_starts;
    }
    outcome.ledger =
        budget_ledger(info.kind, static_cast<int>(outcome.context_starts.size()),
                      data.num_days(), cfg.meta, cfg.baseline);

    // canonical ledger check against the published 12-context, 365-day counts
    const BudgetLedger canonical =
        budget_ledger(info.kind, 12, 365, MetaConfig{}, BaselineConfig{});
    if (info.kind != MethodKind::Rule1 && info.kind != MethodKind::Rule2 &&
        (outcome.ledger.training_budget != canonical.training_budget ||
         outcome.ledger.data_volume != canonical.data_volume))
        std::cerr << "warning: " << cfg.method << " budget " << outcome.ledger.training_budget
                  << "/" << outcome.ledger.data_volume
                  << " differs from the published ledger " << canonical.training_budget << "/"
                  << canonical.data_volume << " (context count or overrides)\n";

    CsvWriter metrics(cfg.out_dir + "/metrics.csv",
                      "method,seed,eu,hv,sp,hv_over_sp,bill,comfort");
    for (std::uint64_t seed : cfg.seeds) {
        SeedOutcome so;
        so.seed = seed;
        so.result = run_method_once(cfg, info, data, outcome.context_starts, seed);
        const MetricReport& m = so.result.metrics;
        metrics.row({cfg.method, std::to_string(seed), CsvWriter::num(m.eu),
                     CsvWriter::num(m.hv), m.sp ? CsvWriter::num(*m.sp) : "",
                     m.hv_over_sp ? CsvWriter::num(*m.hv_over_sp) : "",
                     CsvWriter::num(m.bill_w91), CsvWriter::num(m.comfort_w19)});
        const std::string tag = "_seed" + std::to_string(seed);
        write_solution_csv(cfg.out_dir + "/solutions" + tag + ".csv", so.result.full_set);
        write_solution_csv(cfg.out_dir + "/front" + tag + ".csv", so.result.front);
        write_reward_log(cfg.out_dir + "/rewards" + tag + "_w91.csv", so.result.log_w91);
        write_reward_log(cfg.out_dir + "/rewards" + tag + "_w19.csv", so.result.log_w19);
        if (so.result.final_params) {
            const std::string ckpt = cfg.out_dir + "/checkpoint" + tag + ".bin";
            save_params(*so.result.final_params, ckpt);
            std::string support_str;
            for (const auto& w : so.result.final_support)
                support_str += (support_str.empty() ? "" : ";") + CsvWriter::num(w[0]);
            write_manifest(ckpt + ".manifest",
                           {{"support_w0", support_str},
                            {"steps", std::to_string(so.result.training_budget)},
                            {"seed", std::to_string(seed)}});
        }
        outcome.seeds.push_back(std::move(so));
    }

    std::vector<std::pair<std::string, std::string>> man = {
        {"method", cfg.method},
        {"kind", kind_name(info.kind)},
        {"variant", info.variant == Variant::LS ? "ls" : "pd"},
        {"seeds", [&] {
             std::string s;
             for (auto v : cfg.seeds) s += (s.empty() ? "" : ",") + std::to_string(v);
             return s;
         }()},
        {"data_volume", std::to_string(outcome.ledger.data_volume)},
        {"training_budget", std::to_string(outcome.ledger.training_budget)},
        {"contexts", join_ints(outcome.context_starts)},
        {"n_days", std::to_string(data.num_days())},
        {"eval_weights", std::to_string(cfg.eval_weights)},
    };
    write_manifest(cfg.out_dir + "/manifest.txt", man);
    return outcome;
}

double percent_improvement(double candidate, double baseline) {
    if (baseline == 0.0)
        throw NumericError("percent_improvement: zero baseline metric");
    return (candidate - baseline) / baseline * 100.0;
}

namespace {

struct MethodMetrics {
    std::string method;
    std::vector<double> eu, hv, sp, hvsp, bill, comfort;
};

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

void cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    if (run_dirs.size() < 2)
        throw std::invalid_argument("report needs at least 2 run directories");
    fs::create_directories(out_dir);

    std::vector<MethodMetrics> methods;
    struct FrontPoint {
        std::string method;
        double v0, v1;
        bool front;
    };
    std::vector<FrontPoint> points;

    for (const std::string& dir : run_dirs) {
        if (!fs::exists(dir + "/metrics.csv"))
            throw DataError("missing metrics.csv in run directory: " + dir);
        const auto rows = read_csv(dir + "/metrics.csv");
        MethodMetrics mm;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            mm.method = r[0];
            mm.eu.push_back(std::stod(r[2]));
            mm.hv.push_back(std::stod(r[3]));
            if (!r[4].empty()) mm.sp.push_back(std::stod(r[4]));
            if (!r[5].empty()) mm.hvsp.push_back(std::stod(r[5]));
            mm.bill.push_back(std::stod(r[6]));
            mm.comfort.push_back(std::stod(r[7]));
        }
        if (mm.method.empty()) throw DataError("empty metrics.csv in " + dir);
        methods.push_back(std::move(mm));

        const auto man = read_manifest(dir + "/manifest.txt");
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            const bool is_front = name.rfind("front_seed", 0) == 0;
            const bool is_full = name.rfind("solutions_seed", 0) == 0;
            if (!is_front && !is_full) continue;
            const auto rows2 = read_csv(entry.path().string());
            for (std::size_t i = 1; i < rows2.size(); ++i)
                points.push_back({man.at("method"), std::stod(rows2[i][1]),
                                  std::stod(rows2[i][2]), is_front});
        }
    }

    // summary table: median over seeds per metric, best-per-column marks
    struct Row {
        std::string method;
        double eu, hv, sp, hvsp, bill, comfort;
    };
    std::vector<Row> table;
    for (const auto& mm : methods)
        table.push_back({mm.method, median(mm.eu), median(mm.hv), median(mm.sp),
                         median(mm.hvsp), median(mm.bill), median(mm.comfort)});

    auto best_idx = [&](auto proj, bool maximize) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < table.size(); ++i) {
            const double a = proj(table[i]), b = proj(table[best]);
            if (std::isnan(a)) continue;
            if (std::isnan(b) || (maximize ? a > b : a < b)) best = i;
        }
        return best;
    };
    const std::size_t b_eu = best_idx([](const Row& r) { return r.eu; }, true);
    const std::size_t b_hv = best_idx([](const Row& r) { return r.hv; }, true);
    const std::size_t b_sp = best_idx([](const Row& r) { return r.sp; }, false);
    const std::size_t b_hvsp = best_idx([](const Row& r) { return r.hvsp; }, true);
    const std::size_t b_bill = best_idx([](const Row& r) { return r.bill; }, false);
    const std::size_t b_comf = best_idx([](const Row& r) { return r.comfort; }, true);

    {
        CsvWriter w(out_dir + "/summary.csv",
                    "method,eu,hv,sp,hv_over_sp,bill,comfort,best_columns");
        for (std::size_t i = 0; i < table.size(); ++i) {
            std::string best;
            auto mark = [&](bool is, const char* name) {
                if (is) best += std::string(best.empty() ? "" : ";") + name;
            };
            mark(i == b_eu, "eu");
            mark(i == b_hv, "hv");
            mark(i == b_sp, "sp");
            mark(i == b_hvsp, "hv_over_sp");
            mark(i == b_bill, "bill");
            mark(i == b_comf, "comfort");
            const Row& r = table[i];
            w.row({r.method, CsvWriter::num(r.eu), CsvWriter::num(r.hv),
                   std::isnan(r.sp) ? "" : CsvWriter::num(r.sp),
                   std::isnan(r.hvsp) ? "" : CsvWriter::num(r.hvsp), CsvWriter::num(r.bill),
                   CsvWriter::num(r.comfort), best});
        }
    }
    {
        std::ofstream txt(out_dir + "/summary.txt");
        txt << "method                 EU^      HV^      Sp_v     HV/Sp^   Bill_v  Comfort^\n";
        for (std::size_t i = 0; i < table.size(); ++i) {
            const Row& r = table[i];
            auto cell = [&](double v, bool best) {
                std::ostringstream ss;
                ss.precision(6);
                ss << v << (best ? "*" : "");
                return ss.str();
            };
            txt << r.method;
            for (std::size_t pad = r.method.size(); pad < 22; ++pad) txt << ' ';
            txt << ' ' << cell(r.eu, i == b_eu) << "  " << cell(r.hv, i == b_hv) << "  "
                << cell(r.sp, i == b_sp) << "  " << cell(r.hvsp, i == b_hvsp) << "  "
                << cell(r.bill, i == b_bill) << "  " << cell(r.comfort, i == b_comf) << '\n';
        }
    }

    // pairwise percentage improvements, (candidate - baseline) / baseline
    {
        CsvWriter w(out_dir + "/percent.csv", "candidate,baseline,metric,improvement_pct");
        auto emit = [&](const Row& c, const Row& b, const char* metric, double cv, double bv) {
            if (std::isnan(cv) || std::isnan(bv) || bv == 0.0) {
                w.row({c.method, b.method, metric, ""});
                return;
            }
            w.row({c.method, b.method, metric, CsvWriter::num(percent_improvement(cv, bv))});
        };
        for (const Row& c : table)
            for (const Row& b : table) {
                if (c.method == b.method) continue;
                emit(c, b, "eu", c.eu, b.eu);
                emit(c, b, "hv", c.hv, b.hv);
                emit(c, b, "sp", c.sp, b.sp);
                emit(c, b, "bill", c.bill, b.bill);
                emit(c, b, "comfort", c.comfort, b.comfort);
            }
    }

    // box-plot data + figures
    {
        CsvWriter w(out_dir + "/eu_box.csv", "method,seed_index,eu");
        for (const auto& mm : methods)
            for (std::size_t i = 0; i < mm.eu.size(); ++i)
                w.row({mm.method, std::to_string(i), CsvWriter::num(mm.eu[i])});
    }
    {
        SvgFigure fig(900, 460, "Expected utility across seeds", "method", "EU");
        for (std::size_t i = 0; i < methods.size(); ++i) {
            const auto& eu = methods[i].eu;
            if (eu.empty()) continue;
            std::vector<double> v = eu;
            fig.box(static_cast<double>(i), quantile(v, 0.0), quantile(v, 0.25),
                    quantile(v, 0.5), quantile(v, 0.75), quantile(v, 1.0), 0.3,
                    SvgFigure::palette()[i % SvgFigure::palette().size()],
                    methods[i].method);
            fig.xtick_label(static_cast<double>(i), std::to_string(i));
        }
        fig.save(out_dir + "/eu_box.svg");
    }
    {
        CsvWriter w(out_dir + "/pf_points.csv", "method,v_0,v_1");
        SvgFigure fig(700, 520, "Pareto front approximations", "neg_cost", "comfort");
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by;
        for (const FrontPoint& p : points)
            if (p.front) {
                w.row({p.method, CsvWriter::num(p.v0), CsvWriter::num(p.v1)});
                by[p.method].first.push_back(p.v0);
                by[p.method].second.push_back(p.v1);
            }
        std::size_t ci = 0;
        for (const auto& [method, xy] : by)
            fig.scatter(xy.first, xy.second,
                        SvgFigure::palette()[ci++ % SvgFigure::palette().size()], 3.5, method);
        fig.save(out_dir + "/pf.svg");
    }
    {
        CsvWriter w(out_dir + "/full_solutions.csv", "method,v_0,v_1");
        SvgFigure fig(700, 520, "Full solution sets", "neg_cost", "comfort");
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by;
        for (const FrontPoint& p : points)
            if (!p.front) {
                w.row({p.method, CsvWriter::num(p.v0), CsvWriter::num(p.v1)});
                by[p.method].first.push_back(p.v0);
                by[p.method].second.push_back(p.v1);
            }
        std::size_t ci = 0;
        for (const auto& [method, xy] : by)
            fig.scatter(xy.first, xy.second,
                        SvgFigure::palette()[ci++ % SvgFigure::palette().size()], 2.5, method);
        fig.save(out_dir + "/full.svg");
    }
}

}  // namespace morl
