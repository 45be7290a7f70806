// Command line front end. Subcommands:
//
//   solve     run one of the engines on an instance file
//   verify    check properties of a given allocation against an instance
//   generate  emit a seeded random instance
//   oracle    exhaustive existence queries over the allocation space
//   fuzz      hunt for strategyproofness violations
//
// All machine-readable output is canonical JSON on stdout, errors go to
// stderr with exit code 2. Verification-style commands exit 0 when the
// queried property holds (all properties hold, no manipulation found, an
// allocation exists) and 1 otherwise. The FAIRMATCH_ENUM_CAP environment
// variable overrides the default enumeration cap.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairmatch/engines.hpp"
#include "fairmatch/extended.hpp"
#include "fairmatch/io.hpp"
#include "fairmatch/matching_core.hpp"
#include "fairmatch/model.hpp"
#include "fairmatch/oracle.hpp"
#include "fairmatch/relations.hpp"

namespace {

using fairmatch::Allocation;
using fairmatch::Instance;
using fairmatch::ExtendedInstance;
using json = nlohmann::ordered_json;

constexpr int kExitHolds = 0;
constexpr int kExitViolated = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::uint64_t enum_cap_from_env() {
    const char* raw = std::getenv("FAIRMATCH_ENUM_CAP");
    if (raw == nullptr || *raw == '\0') return fairmatch::kDefaultEnumCap;
    std::string text(raw);
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("FAIRMATCH_ENUM_CAP is not a number: " + text);
    }
    if (used != text.size() || value == 0)
        throw std::runtime_error("FAIRMATCH_ENUM_CAP is not a positive number: " + text);
    return value;
}

fairmatch::PairOrder make_pair_order(const std::string& spec, int participant_count,
                                     int slot_count) {
    if (spec == "default") return fairmatch::default_pair_order(participant_count, slot_count);
    const std::string prefix = "seeded:";
    if (spec.rfind(prefix, 0) == 0) {
        std::string digits = spec.substr(prefix.size());
        std::size_t used = 0;
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(digits, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != digits.size() || digits.empty())
            throw std::runtime_error("bad pair order seed: " + spec);
        return fairmatch::seeded_pair_order(participant_count, slot_count, seed);
    }
    throw std::runtime_error("bad pair order \"" + spec + "\" (use default or seeded:<n>)");
}

json allocation_json(const Allocation& alloc, const std::vector<std::string>& names) {
    json bundles = json::array();
    std::vector<char> assigned(names.size(), 0);
    for (const auto& bundle : alloc.bundles) {
        json row = json::array();
        for (int p : bundle) {
            row.push_back(names.at(static_cast<std::size_t>(p)));
            assigned[static_cast<std::size_t>(p)] = 1;
        }
        bundles.push_back(std::move(row));
    }
    json unassigned = json::array();
    for (std::size_t p = 0; p < names.size(); ++p)
        if (!assigned[p]) unassigned.push_back(names[p]);
    json out;
    out["bundles"] = std::move(bundles);
    out["unassigned"] = std::move(unassigned);
    return out;
}

json trace_json(const Instance& inst, const std::vector<fairmatch::Slot>& slots,
                const std::vector<fairmatch::IterationRecord>& iterations) {
    json out = json::array();
    for (const auto& record : iterations) {
        json entry;
        json eligibility;
        for (int p = 0; p < inst.participant_count(); ++p) {
            json teams = json::array();
            for (int team : record.eligibility.sets[static_cast<std::size_t>(p)])
                teams.push_back(team + 1);
            eligibility[inst.participants[static_cast<std::size_t>(p)]] = std::move(teams);
        }
        entry["eligibility"] = std::move(eligibility);
        json matching = json::array();
        for (auto [p, s] : record.matching.pairs()) {
            json pair = json::array();
            pair.push_back(inst.participants[static_cast<std::size_t>(p)]);
            pair.push_back(fairmatch::slot_name(slots[static_cast<std::size_t>(s)]));
            matching.push_back(std::move(pair));
        }
        entry["matching"] = std::move(matching);
        json values;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (record.slot_values[s] == fairmatch::kMinusInfinity)
                values[fairmatch::slot_name(slots[s])] = nullptr;
            else
                values[fairmatch::slot_name(slots[s])] = record.slot_values[s];
        }
        entry["slot_values"] = std::move(values);
        json outcomes;
        for (int p = 0; p < inst.participant_count(); ++p) {
            if (record.participant_outcomes[static_cast<std::size_t>(p)] ==
                fairmatch::kUnmatchedOutcome)
                outcomes[inst.participants[static_cast<std::size_t>(p)]] = "unmatched";
            else
                outcomes[inst.participants[static_cast<std::size_t>(p)]] =
                    record.participant_outcomes[static_cast<std::size_t>(p)];
        }
        entry["participant_outcomes"] = std::move(outcomes);
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : csv) {
        if (ch == ',') {
            if (!current.empty()) out.push_back(current);
            current.clear();
        } else {
            current += ch;
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

int run_solve(const std::string& algorithm, const std::string& path, bool trace,
              const std::string& pair_order_spec, std::uint64_t tie_break_seed) {
    fairmatch::ParsedInstance parsed = fairmatch::parse_instance_text(read_file(path));
    json out;
    out["algorithm"] = algorithm;

    if (algorithm == "extended") {
        if (!std::holds_alternative<ExtendedInstance>(parsed))
            throw std::runtime_error("algorithm extended needs an instance with quotas");
        const auto& ext = std::get<ExtendedInstance>(parsed);
        fairmatch::AugmentedInstance aug = fairmatch::augment_instance(ext);
        int side = aug.instance.participant_count();
        fairmatch::ExtendedResult result =
            fairmatch::solve_extended_full(ext, make_pair_order(pair_order_spec, side, side));
        out["allocation"] = allocation_json(result.allocation, ext.participants);
        if (trace)
            out["trace"] = trace_json(result.augmented.instance, result.inner.slots,
                                      result.inner.iterations);
        std::cout << out.dump(2) << "\n";
        return kExitHolds;
    }

    if (!std::holds_alternative<Instance>(parsed))
        throw std::runtime_error("algorithm " + algorithm +
                                 " works on base instances; use --alg extended for quotas");
    const auto& inst = std::get<Instance>(parsed);
    if (algorithm == "rr-top") {
        out["allocation"] = allocation_json(fairmatch::round_robin_top(inst), inst.participants);
    } else if (algorithm == "auxiliary") {
        out["allocation"] = allocation_json(
            fairmatch::auxiliary_gale_shapley(inst, tie_break_seed), inst.participants);
    } else if (algorithm == "main") {
        int m = inst.participant_count();
        fairmatch::MainResult result =
            fairmatch::main_algorithm(inst, make_pair_order(pair_order_spec, m, m));
        out["allocation"] = allocation_json(result.allocation, inst.participants);
        if (trace) out["trace"] = trace_json(inst, result.slots, result.iterations);
    } else {
        throw std::runtime_error("unknown algorithm " + algorithm);
    }
    std::cout << out.dump(2) << "\n";
    return kExitHolds;
}

int run_verify(const std::string& props_csv, const std::string& allocation_path,
               const std::string& instance_path, std::uint64_t enum_cap) {
    fairmatch::ParsedInstance parsed = fairmatch::parse_instance_text(read_file(instance_path));
    std::vector<std::string> prop_names = split_csv(props_csv);
    if (prop_names.empty()) throw std::runtime_error("no properties requested");

    bool all_hold = true;
    if (std::holds_alternative<Instance>(parsed)) {
        const auto& inst = std::get<Instance>(parsed);
        Allocation alloc = fairmatch::parse_allocation_text(read_file(allocation_path),
                                                            inst.participants, inst.team_count);
        for (const auto& name : prop_names) {
            auto prop = fairmatch::prop_from_name(name);
            if (!prop) throw std::runtime_error("unknown property \"" + name + "\"");
            fairmatch::PropertyReport report =
                fairmatch::check_property(inst, alloc, *prop, enum_cap);
            if (report.holds) {
                std::cout << name << ": holds\n";
            } else {
                std::cout << name << ": FAILS (" << report.detail << ")\n";
                all_hold = false;
            }
        }
    } else {
        const auto& ext = std::get<ExtendedInstance>(parsed);
        Allocation alloc = fairmatch::parse_allocation_text(read_file(allocation_path),
                                                            ext.participants, ext.team_count);
        for (const auto& name : prop_names) {
            fairmatch::PropertyReport report;
            if (name == "stability") {
                report = fairmatch::check_stability(ext, alloc);
            } else if (name == "extended-team-justified-sd-ef1") {
                report = fairmatch::check_extended_team_justified_sd_ef1(ext, alloc);
            } else {
                throw std::runtime_error("property \"" + name +
                                         "\" is not defined for instances with quotas");
            }
            if (report.holds) {
                std::cout << name << ": holds\n";
            } else {
                std::cout << name << ": FAILS (" << report.detail << ")\n";
                all_hold = false;
            }
        }
    }
    return all_hold ? kExitHolds : kExitViolated;
}

int run_generate(int teams, int participants, double tie_probability, std::uint64_t seed,
                 bool extended, int max_quota, double unacceptable_probability) {
    if (extended) {
        std::cout << fairmatch::emit_instance(fairmatch::generate_extended(
            teams, participants, max_quota, tie_probability, unacceptable_probability, seed));
    } else {
        std::cout << fairmatch::emit_instance(
            fairmatch::generate(teams, participants, tie_probability, seed));
    }
    return kExitHolds;
}

int run_oracle_exists(const std::string& props_csv, const std::string& path,
                      std::uint64_t enum_cap) {
    fairmatch::ParsedInstance parsed = fairmatch::parse_instance_text(read_file(path));
    if (!std::holds_alternative<Instance>(parsed))
        throw std::runtime_error("oracle exists works on base instances");
    const auto& inst = std::get<Instance>(parsed);
    std::vector<fairmatch::Prop> props;
    for (const auto& name : split_csv(props_csv)) {
        auto prop = fairmatch::prop_from_name(name);
        if (!prop) throw std::runtime_error("unknown property \"" + name + "\"");
        props.push_back(*prop);
    }
    if (props.empty()) throw std::runtime_error("no properties requested");
    auto found = fairmatch::exists_allocation_satisfying(inst, props, enum_cap);
    if (!found) {
        std::cout << "none\n";
        return kExitViolated;
    }
    std::cout << allocation_json(*found, inst.participants).dump(2) << "\n";
    return kExitHolds;
}

int run_fuzz(const std::string& mode_name, std::uint64_t trials, std::uint64_t seed,
             const std::string& path, std::uint64_t enum_cap) {
    fairmatch::ParsedInstance parsed = fairmatch::parse_instance_text(read_file(path));
    if (!std::holds_alternative<Instance>(parsed))
        throw std::runtime_error("fuzz sp works on base instances");
    const auto& inst = std::get<Instance>(parsed);
    fairmatch::FuzzMode mode;
    if (mode_name == "singleton") mode = fairmatch::FuzzMode::SingletonExhaustive;
    else if (mode_name == "group") mode = fairmatch::FuzzMode::GroupRandom;
    else throw std::runtime_error("unknown fuzz mode " + mode_name);

    fairmatch::FuzzReport report =
        fairmatch::strategyproofness_fuzz(inst, mode, trials, seed, enum_cap);
    json out;
    out["mode"] = mode_name;
    out["deviations_tested"] = report.deviations_tested;
    out["weak_improvements"] = report.weak_improvements;
    json manipulations = json::array();
    for (const auto& finding : report.manipulations) {
        json entry;
        json coalition = json::array();
        for (int p : finding.deviation.coalition)
            coalition.push_back(inst.participants[static_cast<std::size_t>(p)]);
        entry["coalition"] = std::move(coalition);
        json reports = json::array();
        for (std::size_t k = 0; k < finding.deviation.reports.size(); ++k) {
            json tiers = json::array();
            for (const auto& tier : finding.deviation.reports[k].tiers()) {
                json row = json::array();
                for (int team : tier) row.push_back(team + 1);
                tiers.push_back(std::move(row));
            }
            reports.push_back(std::move(tiers));
        }
        entry["reports"] = std::move(reports);
        entry["truthful"] = allocation_json(finding.truthful, inst.participants);
        entry["deviated"] = allocation_json(finding.deviated, inst.participants);
        manipulations.push_back(std::move(entry));
    }
    out["manipulations"] = std::move(manipulations);
    std::cout << out.dump(2) << "\n";
    return report.manipulations.empty() ? kExitHolds : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair, efficient, and strategyproof team formation"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "run an engine on an instance");
    std::string algorithm;
    std::string solve_file;
    std::string pair_order_spec = "default";
    std::uint64_t tie_break_seed = 0;
    bool trace = false;
    solve->add_option("--alg", algorithm, "rr-top, auxiliary, main, or extended")->required();
    solve->add_flag("--trace", trace, "include per-iteration details");
    solve->add_option("--pair-order", pair_order_spec, "default or seeded:<n>");
    solve->add_option("--tie-break-seed", tie_break_seed,
                      "tie-break seed for the auxiliary engine");
    solve->add_option("file", solve_file, "instance file")->required();

    auto* verify = app.add_subcommand("verify", "check properties of an allocation");
    std::string verify_props;
    std::string verify_allocation;
    std::string verify_file;
    verify->add_option("--props", verify_props, "comma-separated property list")->required();
    verify->add_option("--allocation", verify_allocation, "allocation file")->required();
    verify->add_option("instance", verify_file, "instance file")->required();

    auto* generate = app.add_subcommand("generate", "emit a seeded random instance");
    int gen_teams = 0;
    int gen_participants = 0;
    double gen_tie = 0.0;
    std::uint64_t gen_seed = 0;
    bool gen_extended = false;
    int gen_max_quota = 3;
    double gen_unacceptable = 0.2;
    generate->add_option("--n", gen_teams, "number of teams")->required();
    generate->add_option("--m", gen_participants, "number of participants")->required();
    generate->add_option("--tie-prob", gen_tie, "tie probability in [0, 1]")->required();
    generate->add_option("--seed", gen_seed, "generator seed")->required();
    generate->add_flag("--extended", gen_extended, "generate quotas and unacceptability");
    generate->add_option("--max-quota", gen_max_quota, "largest quota to draw");
    generate->add_option("--unacceptable-prob", gen_unacceptable,
                         "probability an alternative is unacceptable");

    auto* oracle = app.add_subcommand("oracle", "exhaustive existence queries");
    auto* oracle_exists = oracle->add_subcommand("exists", "search the allocation space");
    std::string oracle_props;
    std::string oracle_file;
    oracle_exists->add_option("--props", oracle_props, "comma-separated property list")
        ->required();
    oracle_exists->add_option("file", oracle_file, "instance file")->required();
    oracle->require_subcommand(1);

    auto* fuzz = app.add_subcommand("fuzz", "randomized incentive checks");
    auto* fuzz_sp = fuzz->add_subcommand("sp", "search for profitable misreports");
    std::string fuzz_mode;
    std::uint64_t fuzz_trials = 1000;
    std::uint64_t fuzz_seed = 0;
    std::string fuzz_file;
    fuzz_sp->add_option("--mode", fuzz_mode, "singleton or group")->required();
    fuzz_sp->add_option("--trials", fuzz_trials, "trial count for group mode");
    fuzz_sp->add_option("--seed", fuzz_seed, "fuzzing seed");
    fuzz_sp->add_option("file", fuzz_file, "instance file")->required();
    fuzz->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        std::uint64_t enum_cap = enum_cap_from_env();
        if (solve->parsed())
            return run_solve(algorithm, solve_file, trace, pair_order_spec, tie_break_seed);
        if (verify->parsed())
            return run_verify(verify_props, verify_allocation, verify_file, enum_cap);
        if (generate->parsed())
            return run_generate(gen_teams, gen_participants, gen_tie, gen_seed, gen_extended,
                                gen_max_quota, gen_unacceptable);
        if (oracle->parsed()) return run_oracle_exists(oracle_props, oracle_file, enum_cap);
        if (fuzz->parsed()) return run_fuzz(fuzz_mode, fuzz_trials, fuzz_seed, fuzz_file, enum_cap);
    } catch (const std::exception& e) {
        std::cerr << "fairmatch: " << e.what() << "\n";
        return kExitError;
    }
    std::cerr << "fairmatch: no subcommand\n";
    return kExitError;
}
