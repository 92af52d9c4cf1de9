#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nxbench/catalog.hpp"
#include "nxbench/domain.hpp"

namespace nxbench {

/// Exactly `count` unique samples labelled family(family_id); a pure
/// function of (spec, count). Throws CapacityError when the archetype's
/// output space cannot hold `count` distinct names.
std::vector<Sample> generate_family(const GeneratorSpec& spec, std::int64_t count,
                                    const std::string& family_id = "synthetic");

/// Upper bound on distinct outputs, or nullopt when effectively unbounded.
std::optional<std::int64_t> generator_capacity(const GeneratorSpec& spec);

/// Benign NX-style names: typo mutations of popular names, software
/// leftovers (wpad, _ldap._tcp, printers) and benign machine-generated
/// probes. Deterministic in seed; throws ArgumentError for count < 1.
std::vector<Sample> synthesize_benign(std::uint64_t seed, std::int64_t count);

/// Built-in vocabularies.
const std::vector<std::string>& default_dictionary_words();
const std::vector<std::string>& benign_vocabulary();

}  // namespace nxbench
