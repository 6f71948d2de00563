// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "specsva/rtl.hpp"

namespace specsva {

enum class MutationKind { BinaryOpReplace, CondNegate, ConstReplace, SignalSwap, ResetBranchDelete };

std::string to_string(MutationKind k);
MutationKind parse_mutation_kind(std::string_view text);

struct MutationOperator {
  MutationKind kind = MutationKind::BinaryOpReplace;
  std::string from;  // textual before/after of the edited node
  std::string to;
};

struct Mutant {
  std::string id;
  MutationOperator op;
  /// e.g. "proc0/if0", "proc0/if0/else/nba1#e2", "assign3#e0".
  std::string location;
  /// Signals assigned inside the edited statement.
  std::vector<std::string> affected;
  RtlModule module;
  std::string diff;
};

/// Every applicable (operator, site) pair in a fixed walk order, minus
/// mutants that fold to the original (or to an earlier mutant) and mutants
/// that break structural validity.
std::vector<Mutant> enumerate_mutants(const RtlModule& rtl);

/// enumerate_mutants, then uniform selection sampling down to `budget`.
/// Ids are assigned after selection: m000, m001, ...
/// Throws NoMutationSites.
std::vector<Mutant> generate_mutants(const RtlModule& rtl, std::size_t budget, std::uint64_t seed);

/// Line diff between two sources ("-"/"+" lines, unified-style hunk header).
std::string line_diff(const std::string& before, const std::string& after);

/// mutants/manifest.json plus one .v file per mutant.
void write_mutants(const std::filesystem::path& dir, const RtlModule& rtl, const std::vector<Mutant>& mutants,
                   std::size_t budget, std::uint64_t seed);
std::vector<Mutant> load_mutants(const std::filesystem::path& dir);

}  // namespace specsva
