// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dfsq {

/// One word set: a small list of addends, each exactly 0 or a power of two
/// 2^k with -32 <= k <= 0. Every universal-set candidate takes one addend
/// from each word set, which is what keeps the arithmetic shifter-friendly.
struct WordSet {
    std::vector<double> elements;
};

struct UniversalSetConfig {
    std::vector<WordSet> word_sets;
    bool include_negatives = true;

    /// Number of word sets; also the divisor applied to every candidate sum.
    std::size_t divisor() const { return word_sets.size(); }

    /// Throws ValidationError naming the offending set index and element.
    void validate() const;

    static UniversalSetConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Pool of candidate quantization points, sorted strictly ascending.
///
/// Sets produced by generate_universal_set carry provenance: for each point
/// an exact fixed-point numerator (units of 2^-32) and a witness choice of
/// one element per word set, so hardware-friendliness holds by construction.
/// Sets loaded from plain value lists have no provenance and are verified by
/// search instead.
class UniversalSet {
public:
    /// Exact decomposition evidence for |value| * divisor = sum of addends.
    struct Provenance {
        std::uint64_t numerator = 0;          // |value| * divisor * 2^32, exact
        std::vector<std::uint8_t> word_index; // chosen element per word set
    };

    UniversalSet() = default;

    /// Wraps a foreign list of points (deduplicated, sorted ascending).
    static UniversalSet from_values(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool has_provenance() const { return !provenance_.empty(); }
    const std::vector<Provenance>& provenance() const { return provenance_; }

    /// Serialized as a plain JSON array of numbers.
    nlohmann::json to_json() const;
    static UniversalSet from_json(const nlohmann::json& j);

    /// One value per line, ascending.
    void write_csv(std::ostream& os) const;

private:
    friend UniversalSet generate_universal_set(const UniversalSetConfig&);

    std::vector<double> values_;        // ascending
    std::vector<Provenance> provenance_; // parallel to values_ when present
};

/// All distinct averages (e1 + ... + em) / m with ej drawn from word set j,
/// plus their negations when include_negatives is set. Deduplication is exact
/// (integer numerators), output ascending.
UniversalSet generate_universal_set(const UniversalSetConfig& config);

/// Built-in word-set configurations setting1 (2x4) ... setting4 (5x4).
UniversalSetConfig builtin_setting(std::string_view name);
const std::vector<std::string>& builtin_setting_names();

struct HardwareFriendlinessReport {
    struct Entry {
        double value = 0.0;
        bool ok = false;
        std::vector<double> addends; // one element per word set; |value|*m == sum
    };
    bool all_ok = true;
    std::vector<Entry> entries;      // one per point, set order
    std::vector<double> violations;  // points with no decomposition
};

/// For every point exhibits |p| * m as a sum of one element per word set, or
/// reports the point as a violation. Uses stored provenance when available,
/// exact integer search otherwise.
HardwareFriendlinessReport verify_hardware_friendly(const UniversalSet& set,
                                                    const UniversalSetConfig& config);

/// n points picked at evenly spaced indices (endpoints included) from an
/// ascending set; used for size sweeps. Requires 2 <= n <= set size.
UniversalSet evenly_spaced_subset(const UniversalSet& set, std::size_t n);

} // namespace dfsq
