#pragma once

// JSON instance and allocation documents, plus the seeded instance
// generators.
//
// Instance document fields, in canonical order:
//   teams              number of teams (integer, at least 1)
//   participants       participant names, unique, nonempty, not "UNASSIGNED"
//   team_prefs         one weak order per team: an array of tiers, each an
//                      array of participant names, best tier first
//   participant_prefs  one weak order per participant: tiers of 1-based team
//                      numbers
//   quotas             optional; its presence marks the extended setting
// In the extended setting every weak order on both sides must rank the
// string "UNASSIGNED" exactly once; in the base setting it may not appear.
//
// Allocation documents carry "bundles" (one name array per team) and the
// derived "unassigned" list. Emission is canonical: two-space indent, members
// of a tier or bundle in id order, trailing newline.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairmatch/model.hpp"
#include "fairmatch/relations.hpp"
#include "fairmatch/rng.hpp"

namespace fairmatch {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& message)
        : std::runtime_error(where + ": " + message), where_(where) {}

    const std::string& where() const { return where_; }

private:
    std::string where_;
};

inline constexpr const char* kUnassignedName = "UNASSIGNED";

using ParsedInstance = std::variant<Instance, ExtendedInstance>;

namespace detail {

using json = nlohmann::ordered_json;

inline const json& require_field(const json& doc, const std::string& key,
                                 const std::string& where) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ParseError(where, "missing required field \"" + key + "\"");
    return *it;
}

inline int parse_count(const json& value, const std::string& where) {
    if (!value.is_number_integer())
        throw ParseError(where, "expected an integer");
    auto v = value.get<std::int64_t>();
    if (v < 1 || v > 1'000'000) throw ParseError(where, "value out of range");
    return static_cast<int>(v);
}

inline std::vector<std::string> parse_participants(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty())
        throw ParseError(where, "expected a nonempty array of names");
    std::vector<std::string> names;
    for (std::size_t k = 0; k < value.size(); ++k) {
        const auto& entry = value[k];
        std::string at = where + "[" + std::to_string(k) + "]";
        if (!entry.is_string()) throw ParseError(at, "expected a name string");
        std::string name = entry.get<std::string>();
        if (name.empty()) throw ParseError(at, "names may not be empty");
        if (name == kUnassignedName)
            throw ParseError(at, "\"UNASSIGNED\" is reserved");
        for (const auto& existing : names)
            if (existing == name) throw ParseError(at, "duplicate name \"" + name + "\"");
        names.push_back(std::move(name));
    }
    return names;
}

// One weak order from an array of tiers. resolve maps a tier entry to an
// alternative id; sentinel_id is the id of "UNASSIGNED" or -1 when the
// sentinel is not allowed.
inline WeakOrder parse_weak_order(const json& value, int universe_size, int sentinel_id,
                                  const std::function<int(const json&, const std::string&)>& resolve,
                                  const std::string& where) {
    if (!value.is_array() || value.empty())
        throw ParseError(where, "expected a nonempty array of tiers");
    std::vector<std::vector<int>> tiers;
    for (std::size_t t = 0; t < value.size(); ++t) {
        const auto& tier = value[t];
        std::string at = where + "[" + std::to_string(t) + "]";
        if (!tier.is_array() || tier.empty())
            throw ParseError(at, "expected a nonempty tier array");
        std::vector<int> ids;
        for (std::size_t k = 0; k < tier.size(); ++k) {
            const auto& entry = tier[k];
            std::string entry_at = at + "[" + std::to_string(k) + "]";
            if (entry.is_string() && entry.get<std::string>() == kUnassignedName) {
                if (sentinel_id < 0)
                    throw ParseError(entry_at,
                                     "\"UNASSIGNED\" is only allowed when quotas are present");
                ids.push_back(sentinel_id);
            } else {
                ids.push_back(resolve(entry, entry_at));
            }
        }
        tiers.push_back(std::move(ids));
    }
    try {
        return WeakOrder(std::move(tiers), universe_size);
    } catch (const std::invalid_argument& e) {
        throw ParseError(where, e.what());
    }
}

inline std::function<int(const json&, const std::string&)> name_resolver(
    const std::vector<std::string>& names) {
    return [&names](const json& entry, const std::string& at) -> int {
        if (!entry.is_string()) throw ParseError(at, "expected a participant name");
        std::string name = entry.get<std::string>();
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        throw ParseError(at, "unknown participant \"" + name + "\"");
    };
}

inline std::function<int(const json&, const std::string&)> team_resolver(int team_count) {
    return [team_count](const json& entry, const std::string& at) -> int {
        if (!entry.is_number_integer()) throw ParseError(at, "expected a team number");
        auto v = entry.get<std::int64_t>();
        if (v < 1 || v > team_count)
            throw ParseError(at, "team number " + std::to_string(v) + " out of range");
        return static_cast<int>(v - 1);
    };
}

}  // namespace detail

inline ParsedInstance parse_instance_text(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ParseError("$", e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "expected a JSON object");
    bool extended = doc.contains("quotas");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "teams" && key != "participants" && key != "team_prefs" &&
            key != "participant_prefs" && key != "quotas")
            throw ParseError("$", "unknown field \"" + key + "\"");
    }

    int team_count = detail::parse_count(detail::require_field(doc, "teams", "$"), "teams");
    std::vector<std::string> names =
        detail::parse_participants(detail::require_field(doc, "participants", "$"), "participants");
    int m = static_cast<int>(names.size());

    const auto& team_prefs_doc = detail::require_field(doc, "team_prefs", "$");
    if (!team_prefs_doc.is_array() || static_cast<int>(team_prefs_doc.size()) != team_count)
        throw ParseError("team_prefs", "expected one weak order per team");
    const auto& participant_prefs_doc = detail::require_field(doc, "participant_prefs", "$");
    if (!participant_prefs_doc.is_array() ||
        static_cast<int>(participant_prefs_doc.size()) != m)
        throw ParseError("participant_prefs", "expected one weak order per participant");

    int team_universe = extended ? m + 1 : m;
    int participant_universe = extended ? team_count + 1 : team_count;
    int team_sentinel = extended ? m : -1;
    int participant_sentinel = extended ? team_count : -1;

    std::vector<WeakOrder> team_prefs;
    for (int i = 0; i < team_count; ++i)
        team_prefs.push_back(detail::parse_weak_order(
            team_prefs_doc[static_cast<std::size_t>(i)], team_universe, team_sentinel,
            detail::name_resolver(names), "team_prefs[" + std::to_string(i) + "]"));
    std::vector<WeakOrder> participant_prefs;
    for (int p = 0; p < m; ++p)
        participant_prefs.push_back(detail::parse_weak_order(
            participant_prefs_doc[static_cast<std::size_t>(p)], participant_universe,
            participant_sentinel, detail::team_resolver(team_count),
            "participant_prefs[" + std::to_string(p) + "]"));

    if (!extended) {
        Instance inst;
        inst.team_count = team_count;
        inst.participants = std::move(names);
        inst.team_prefs = std::move(team_prefs);
        inst.participant_prefs = std::move(participant_prefs);
        validate_instance(inst);
        return inst;
    }

    const auto& quotas_doc = doc["quotas"];
    if (!quotas_doc.is_array() || static_cast<int>(quotas_doc.size()) != team_count)
        throw ParseError("quotas", "expected one quota per team");
    std::vector<int> quotas;
    for (std::size_t i = 0; i < quotas_doc.size(); ++i) {
        std::string at = "quotas[" + std::to_string(i) + "]";
        if (!quotas_doc[i].is_number_integer()) throw ParseError(at, "expected an integer");
        auto q = quotas_doc[i].get<std::int64_t>();
        if (q < 1 || q > m) throw ParseError(at, "quotas must lie in [1, m]");
        quotas.push_back(static_cast<int>(q));
    }

    ExtendedInstance ext;
    ext.team_count = team_count;
    ext.participants = std::move(names);
    ext.team_prefs = std::move(team_prefs);
    ext.participant_prefs = std::move(participant_prefs);
    ext.quotas = std::move(quotas);
    validate_extended_instance(ext);
    return ext;
}

namespace detail {

inline json tiers_as_names(const WeakOrder& order, const std::vector<std::string>& names,
                           int sentinel_id) {
    json out = json::array();
    for (const auto& tier : order.tiers()) {
        json row = json::array();
        for (int a : tier) {
            if (a == sentinel_id) row.push_back(kUnassignedName);
            else row.push_back(names[static_cast<std::size_t>(a)]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

inline json tiers_as_team_numbers(const WeakOrder& order, int sentinel_id) {
    json out = json::array();
    for (const auto& tier : order.tiers()) {
        json row = json::array();
        for (int a : tier) {
            if (a == sentinel_id) row.push_back(kUnassignedName);
            else row.push_back(a + 1);
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace detail

inline std::string emit_instance(const Instance& inst) {
    detail::json doc;
    doc["teams"] = inst.team_count;
    doc["participants"] = inst.participants;
    detail::json team_prefs = detail::json::array();
    for (const auto& order : inst.team_prefs)
        team_prefs.push_back(detail::tiers_as_names(order, inst.participants, -1));
    doc["team_prefs"] = std::move(team_prefs);
    detail::json participant_prefs = detail::json::array();
    for (const auto& order : inst.participant_prefs)
        participant_prefs.push_back(detail::tiers_as_team_numbers(order, -1));
    doc["participant_prefs"] = std::move(participant_prefs);
    return doc.dump(2) + "\n";
}

inline std::string emit_instance(const ExtendedInstance& ext) {
    detail::json doc;
    doc["teams"] = ext.team_count;
    doc["participants"] = ext.participants;
    detail::json team_prefs = detail::json::array();
    for (const auto& order : ext.team_prefs)
        team_prefs.push_back(detail::tiers_as_names(order, ext.participants,
                                                    ext.unassigned_participant_id()));
    doc["team_prefs"] = std::move(team_prefs);
    detail::json participant_prefs = detail::json::array();
    for (const auto& order : ext.participant_prefs)
        participant_prefs.push_back(
            detail::tiers_as_team_numbers(order, ext.unassigned_team_id()));
    doc["participant_prefs"] = std::move(participant_prefs);
    doc["quotas"] = ext.quotas;
    return doc.dump(2) + "\n";
}

inline std::string emit_instance(const ParsedInstance& parsed) {
    if (std::holds_alternative<Instance>(parsed)) return emit_instance(std::get<Instance>(parsed));
    return emit_instance(std::get<ExtendedInstance>(parsed));
}

inline Allocation parse_allocation_text(const std::string& text,
                                        const std::vector<std::string>& names, int team_count) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ParseError("$", e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "bundles" && key != "unassigned")
            throw ParseError("$", "unknown field \"" + key + "\"");
    }
    const auto& bundles_doc = detail::require_field(doc, "bundles", "$");
    if (!bundles_doc.is_array() || static_cast<int>(bundles_doc.size()) != team_count)
        throw ParseError("bundles", "expected one bundle per team");

    auto resolve = detail::name_resolver(names);
    Allocation alloc = make_allocation(team_count);
    std::vector<char> seen(names.size(), 0);
    for (std::size_t i = 0; i < bundles_doc.size(); ++i) {
        std::string at = "bundles[" + std::to_string(i) + "]";
        if (!bundles_doc[i].is_array()) throw ParseError(at, "expected an array of names");
        for (std::size_t k = 0; k < bundles_doc[i].size(); ++k) {
            int p = resolve(bundles_doc[i][k], at + "[" + std::to_string(k) + "]");
            if (seen[static_cast<std::size_t>(p)])
                throw ParseError(at, "participant \"" + names[static_cast<std::size_t>(p)] +
                                         "\" appears twice");
            seen[static_cast<std::size_t>(p)] = 1;
            alloc.bundles[i].push_back(p);
        }
    }
    sort_allocation(alloc);

    if (doc.contains("unassigned")) {
        const auto& un = doc["unassigned"];
        if (!un.is_array()) throw ParseError("unassigned", "expected an array of names");
        std::vector<char> listed(names.size(), 0);
        for (std::size_t k = 0; k < un.size(); ++k) {
            int p = resolve(un[k], "unassigned[" + std::to_string(k) + "]");
            listed[static_cast<std::size_t>(p)] = 1;
        }
        for (std::size_t p = 0; p < names.size(); ++p)
            if (listed[p] == seen[p])
                throw ParseError("unassigned",
                                 "list disagrees with the bundles about \"" + names[p] + "\"");
    }
    return alloc;
}

inline std::string emit_allocation(const Allocation& alloc,
                                   const std::vector<std::string>& names) {
    detail::json doc;
    detail::json bundles = detail::json::array();
    std::vector<char> assigned(names.size(), 0);
    for (const auto& bundle : alloc.bundles) {
        detail::json row = detail::json::array();
        for (int p : bundle) {
            row.push_back(names.at(static_cast<std::size_t>(p)));
            assigned[static_cast<std::size_t>(p)] = 1;
        }
        bundles.push_back(std::move(row));
    }
    doc["bundles"] = std::move(bundles);
    detail::json unassigned = detail::json::array();
    for (std::size_t p = 0; p < names.size(); ++p)
        if (!assigned[p]) unassigned.push_back(names[p]);
    doc["unassigned"] = std::move(unassigned);
    return doc.dump(2) + "\n";
}

namespace detail {

// Weak order from one permutation and a merge draw per adjacent pair, tying
// each element into the previous tier with the given probability.
inline WeakOrder weak_order_from_draws(int universe_size, std::uint64_t tie_per_mille,
                                       SplitMix64& rng) {
    std::vector<int> perm = shuffled_iota(universe_size, rng);
    std::vector<std::vector<int>> tiers;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (k == 0 || !rng.chance_per_mille(tie_per_mille)) tiers.push_back({perm[k]});
        else tiers.back().push_back(perm[k]);
    }
    return WeakOrder(std::move(tiers), universe_size);
}

inline std::uint64_t per_mille(double probability) {
    if (probability < 0.0) probability = 0.0;
    if (probability > 1.0) probability = 1.0;
    return static_cast<std::uint64_t>(probability * 1000.0 + 0.5);
}

}  // namespace detail

// Seeded random base instance with participants p1..pm. Draw order: one
// permutation plus merge draws per team in id order, then the same per
// participant, so identical seeds yield identical instances everywhere.
inline Instance generate(int team_count, int participant_count, double tie_probability,
                         std::uint64_t seed) {
    if (team_count < 1 || participant_count < 1)
        throw std::invalid_argument("generate needs at least one team and one participant");
    std::uint64_t tie = detail::per_mille(tie_probability);
    SplitMix64 rng(seed);
    Instance inst;
    inst.team_count = team_count;
    for (int p = 0; p < participant_count; ++p)
        inst.participants.push_back("p" + std::to_string(p + 1));
    for (int i = 0; i < team_count; ++i)
        inst.team_prefs.push_back(detail::weak_order_from_draws(participant_count, tie, rng));
    for (int p = 0; p < participant_count; ++p)
        inst.participant_prefs.push_back(detail::weak_order_from_draws(team_count, tie, rng));
    return inst;
}

// Seeded random extended instance. Per weak order the draws are: one
// acceptability draw per alternative in id order, then the permutation and
// merge draws of the acceptable group, then those of the unacceptable group.
// The unassigned option always forms its own tier between the groups. Quotas
// are drawn last, one per team.
inline ExtendedInstance generate_extended(int team_count, int participant_count, int max_quota,
                                          double tie_probability,
                                          double unacceptable_probability, std::uint64_t seed) {
    if (team_count < 1 || participant_count < 1)
        throw std::invalid_argument("generate needs at least one team and one participant");
    if (max_quota < 1) throw std::invalid_argument("generate needs max_quota >= 1");
    std::uint64_t tie = detail::per_mille(tie_probability);
    std::uint64_t unacceptable = detail::per_mille(unacceptable_probability);
    SplitMix64 rng(seed);

    auto draw_order = [&](int alternatives, int sentinel) {
        std::vector<int> acceptable;
        std::vector<int> rejected;
        for (int a = 0; a < alternatives; ++a) {
            if (rng.chance_per_mille(unacceptable)) rejected.push_back(a);
            else acceptable.push_back(a);
        }
        std::vector<std::vector<int>> tiers;
        auto append_group = [&](std::vector<int>& group) {
            fisher_yates(group, rng);
            for (std::size_t k = 0; k < group.size(); ++k) {
                bool merge = k > 0 && rng.chance_per_mille(tie);
                bool into_sentinel =
                    !tiers.empty() && tiers.back().size() == 1 && tiers.back()[0] == sentinel;
                if (merge && !into_sentinel) tiers.back().push_back(group[k]);
                else tiers.push_back({group[k]});
            }
        };
        append_group(acceptable);
        tiers.push_back({sentinel});
        append_group(rejected);
        return WeakOrder(std::move(tiers), alternatives + 1);
    };

    ExtendedInstance ext;
    ext.team_count = team_count;
    for (int p = 0; p < participant_count; ++p)
        ext.participants.push_back("p" + std::to_string(p + 1));
    for (int i = 0; i < team_count; ++i)
        ext.team_prefs.push_back(draw_order(participant_count, participant_count));
    for (int p = 0; p < participant_count; ++p)
        ext.participant_prefs.push_back(draw_order(team_count, team_count));
    int quota_bound = std::min(max_quota, participant_count);
    for (int i = 0; i < team_count; ++i)
        ext.quotas.push_back(1 + static_cast<int>(rng.next_below(
                                     static_cast<std::uint64_t>(quota_bound))));
    return ext;
}

inline std::optional<Prop> prop_from_name(const std::string& name) {
    if (name == "participant-ef") return Prop::ParticipantEF;
    if (name == "participant-justified-ef") return Prop::ParticipantJustifiedEF;
    if (name == "team-sd-ef1") return Prop::TeamSdEF1;
    if (name == "team-justified-sd-ef1") return Prop::TeamJustifiedSdEF1;
    if (name == "balanced") return Prop::Balanced;
    if (name == "swap-stable") return Prop::SwapStable;
    if (name == "po") return Prop::ParetoOptimal;
    return std::nullopt;
}

inline std::string prop_name(Prop prop) {
    switch (prop) {
        case Prop::ParticipantEF: return "participant-ef";
        case Prop::ParticipantJustifiedEF: return "participant-justified-ef";
        case Prop::TeamSdEF1: return "team-sd-ef1";
        case Prop::TeamJustifiedSdEF1: return "team-justified-sd-ef1";
        case Prop::Balanced: return "balanced";
        case Prop::SwapStable: return "swap-stable";
        case Prop::ParetoOptimal: return "po";
    }
    throw std::logic_error("unhandled property");
}

}  // namespace fairmatch
