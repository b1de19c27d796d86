// SPDX-License-Identifier: Apache-2.0
#include "dfsq/universal_set.hpp"

#include "dfsq/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace dfsq {

namespace {

// Word-set elements live on the grid 2^-32; sums of one element per word set
// stay exact in 64 bits for any practical number of word sets.
constexpr int kFracBits = 32;
constexpr int kMinExponent = -32;

// Fixed-point numerator of an element (element * 2^32), or -1 if the element
// is not 0 and not a power of two in [2^-32, 1].
std::int64_t element_numerator(double e) {
    if (e == 0.0) return 0;
    if (!(e > 0.0) || !std::isfinite(e)) return -1;
    int exp = 0;
    const double mant = std::frexp(e, &exp); // e = mant * 2^exp, mant in [0.5, 1)
    if (mant != 0.5) return -1;
    const int k = exp - 1; // e == 2^k
    if (k > 0 || k < kMinExponent) return -1;
    return std::int64_t{1} << (kFracBits + k);
}

std::string format_element(double e) {
    std::ostringstream os;
    os.precision(17);
    os << e;
    return os.str();
}

// value = numerator / (divisor * 2^32); exact for divisors that are powers of
// two, correctly rounded otherwise.
double numerator_to_value(std::uint64_t numerator, std::size_t divisor) {
    return std::ldexp(static_cast<double>(numerator), -kFracBits) /
           static_cast<double>(divisor);
}

} // namespace

void UniversalSetConfig::validate() const {
    if (word_sets.empty())
        throw ValidationError("universal-set config: at least one word set is required");
    for (std::size_t s = 0; s < word_sets.size(); ++s) {
        const auto& elems = word_sets[s].elements;
        if (elems.empty())
            throw ValidationError("word set " + std::to_string(s) + " is empty");
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (element_numerator(elems[i]) < 0)
                throw ValidationError("word set " + std::to_string(s) + ": element " +
                                      format_element(elems[i]) +
                                      " is not 0 or a power of two in [2^-32, 1]");
            for (std::size_t j = 0; j < i; ++j)
                if (elems[i] == elems[j])
                    throw ValidationError("word set " + std::to_string(s) +
                                          ": duplicate element " + format_element(elems[i]));
        }
    }
}

UniversalSetConfig UniversalSetConfig::from_json(const nlohmann::json& j) {
    UniversalSetConfig cfg;
    if (!j.is_object() || !j.contains("word_sets"))
        throw ValidationError("universal-set config JSON: missing \"word_sets\"");
    for (const auto& ws : j.at("word_sets")) {
        WordSet w;
        for (const auto& e : ws) w.elements.push_back(e.get<double>());
        cfg.word_sets.push_back(std::move(w));
    }
    cfg.include_negatives = j.value("include_negatives", true);
    cfg.validate();
    return cfg;
}

nlohmann::json UniversalSetConfig::to_json() const {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& ws : word_sets) sets.push_back(ws.elements);
    return nlohmann::json{{"word_sets", std::move(sets)},
                          {"include_negatives", include_negatives}};
}

UniversalSet UniversalSet::from_values(std::vector<double> values) {
    for (double v : values)
        if (!std::isfinite(v))
            throw ValidationError("universal set contains a non-finite value");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) throw ValidationError("universal set is empty");
    UniversalSet set;
    set.values_ = std::move(values);
    return set;
}

nlohmann::json UniversalSet::to_json() const {
    return nlohmann::json(values_);
}

UniversalSet UniversalSet::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ValidationError("universal set JSON: expected an array of numbers");
    std::vector<double> values;
    values.reserve(j.size());
    for (const auto& v : j) values.push_back(v.get<double>());
    return from_values(std::move(values));
}

void UniversalSet::write_csv(std::ostream& os) const {
    os.precision(17);
    for (double v : values_) os << v << '\n';
}

UniversalSet generate_universal_set(const UniversalSetConfig& config) {
    config.validate();
    const std::size_t m = config.word_sets.size();

    // Element numerators per word set, original order (witness indices refer
    // to this order).
    std::vector<std::vector<std::uint64_t>> nums(m);
    for (std::size_t s = 0; s < m; ++s)
        for (double e : config.word_sets[s].elements)
            nums[s].push_back(static_cast<std::uint64_t>(element_numerator(e)));

    // Enumerate the full product with an odometer; keep the first witness for
    // each distinct sum.
    std::map<std::uint64_t, std::vector<std::uint8_t>> distinct;
    std::vector<std::uint8_t> idx(m, 0);
    for (;;) {
        std::uint64_t sum = 0;
        for (std::size_t s = 0; s < m; ++s) sum += nums[s][idx[s]];
        distinct.emplace(sum, idx);

        std::size_t s = 0;
        while (s < m && ++idx[s] == nums[s].size()) idx[s++] = 0;
        if (s == m) break;
    }

    UniversalSet set;
    if (config.include_negatives) {
        for (auto it = distinct.rbegin(); it != distinct.rend(); ++it) {
            if (it->first == 0) continue;
            set.values_.push_back(-numerator_to_value(it->first, m));
            set.provenance_.push_back({it->first, it->second});
        }
    }
    for (const auto& [num, witness] : distinct) {
        set.values_.push_back(numerator_to_value(num, m));
        set.provenance_.push_back({num, witness});
    }
    return set;
}

const std::vector<std::string>& builtin_setting_names() {
    static const std::vector<std::string> names = {"setting1", "setting2", "setting3",
                                                   "setting4"};
    return names;
}

UniversalSetConfig builtin_setting(std::string_view name) {
    auto p2 = [](int k) { return std::ldexp(1.0, -k); };
    UniversalSetConfig cfg;
    if (name == "setting1") {
        cfg.word_sets = {{{1.0, p2(1), p2(3), 0.0}}, {{1.0, p2(2), p2(4), 0.0}}};
    } else if (name == "setting2") {
        cfg.word_sets = {{{1.0, p2(1), p2(3), 0.0}},
                         {{1.0, p2(2), p2(4), 0.0}},
                         {{1.0, p2(3), p2(5), 0.0}}};
    } else if (name == "setting3") {
        cfg.word_sets = {{{1.0, p2(1), p2(5), 0.0}},
                         {{1.0, p2(2), p2(6), 0.0}},
                         {{1.0, p2(3), p2(7), 0.0}},
                         {{1.0, p2(4), p2(8), 0.0}}};
    } else if (name == "setting4") {
        cfg.word_sets = {{{1.0, p2(1), p2(6), 0.0}},
                         {{1.0, p2(2), p2(7), 0.0}},
                         {{1.0, p2(3), p2(8), 0.0}},
                         {{1.0, p2(4), p2(9), 0.0}},
                         {{1.0, p2(5), p2(10), 0.0}}};
    } else {
        std::string msg = "unknown setting \"";
        msg += name;
        msg += "\"; valid names:";
        for (const auto& n : builtin_setting_names()) msg += " " + n;
        throw ValidationError(msg);
    }
    return cfg;
}

namespace {

// Exact search for numerator = sum of one element numerator per word set.
bool find_decomposition(const std::vector<std::vector<std::uint64_t>>& nums,
                        const std::vector<std::uint64_t>& suffix_max, std::size_t s,
                        std::uint64_t remaining, std::vector<std::uint8_t>& choice) {
    if (s == nums.size()) return remaining == 0;
    if (remaining > suffix_max[s]) return false;
    for (std::size_t i = 0; i < nums[s].size(); ++i) {
        if (nums[s][i] > remaining) continue;
        choice[s] = static_cast<std::uint8_t>(i);
        if (find_decomposition(nums, suffix_max, s + 1, remaining - nums[s][i], choice))
            return true;
    }
    return false;
}

} // namespace

HardwareFriendlinessReport verify_hardware_friendly(const UniversalSet& set,
                                                    const UniversalSetConfig& config) {
    config.validate();
    const std::size_t m = config.word_sets.size();

    std::vector<std::vector<std::uint64_t>> nums(m);
    std::vector<std::uint64_t> suffix_max(m + 1, 0);
    for (std::size_t s = 0; s < m; ++s)
        for (double e : config.word_sets[s].elements)
            nums[s].push_back(static_cast<std::uint64_t>(element_numerator(e)));
    for (std::size_t s = m; s-- > 0;)
        suffix_max[s] = suffix_max[s + 1] + *std::max_element(nums[s].begin(), nums[s].end());

    HardwareFriendlinessReport report;
    const bool with_provenance = set.has_provenance();
    for (std::size_t p = 0; p < set.size(); ++p) {
        const double value = set.values()[p];
        HardwareFriendlinessReport::Entry entry;
        entry.value = value;

        // Recover the exact numerator |value| * m * 2^32; a point is only
        // decomposable if that quantity is an integer that reconstructs the
        // value exactly.
        const double target_real = std::ldexp(std::abs(value) * static_cast<double>(m), 32);
        std::uint64_t target = 0;
        bool representable = false;
        if (target_real >= 0 && target_real < 0x1p63) {
            for (std::int64_t cand = std::llround(target_real) - 1;
                 cand <= std::llround(target_real) + 1; ++cand) {
                if (cand < 0) continue;
                if (numerator_to_value(static_cast<std::uint64_t>(cand), m) == std::abs(value)) {
                    target = static_cast<std::uint64_t>(cand);
                    representable = true;
                    break;
                }
            }
        }

        std::vector<std::uint8_t> choice(m, 0);
        bool ok = false;
        if (representable) {
            if (with_provenance && set.provenance()[p].numerator == target &&
                set.provenance()[p].word_index.size() == m) {
                choice = set.provenance()[p].word_index;
                std::uint64_t sum = 0;
                for (std::size_t s = 0; s < m; ++s) sum += nums[s][choice[s]];
                ok = sum == target;
            }
            if (!ok) ok = find_decomposition(nums, suffix_max, 0, target, choice);
        }

        entry.ok = ok;
        if (ok) {
            for (std::size_t s = 0; s < m; ++s)
                entry.addends.push_back(config.word_sets[s].elements[choice[s]]);
        } else {
            report.all_ok = false;
            report.violations.push_back(value);
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

UniversalSet evenly_spaced_subset(const UniversalSet& set, std::size_t n) {
    if (n < 2 || n > set.size())
        throw ValidationError("evenly_spaced_subset: need 2 <= n <= " +
                              std::to_string(set.size()) + ", got " + std::to_string(n));
    std::vector<double> values;
    values.reserve(n);
    const double stride = static_cast<double>(set.size() - 1) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const auto idx = static_cast<std::size_t>(std::llround(stride * static_cast<double>(j)));
        values.push_back(set.values()[idx]);
    }
    return UniversalSet::from_values(std::move(values));
}

} // namespace dfsq
