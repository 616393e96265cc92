// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "koopid/dataset.hpp"
#include "koopid/edmd.hpp"
#include "koopid/fbcombine.hpp"
#include "koopid/stability.hpp"

namespace koopid {

inline constexpr int kModelFormatVersion = 1;

/// Everything persisted alongside [A B]. Solve times are not stored so that
/// identical inputs give identical files.
struct ModelFile {
  KoopmanModel model;
  std::optional<StabilitySolution> stability;
  std::optional<CombineReport> combine;
  std::string dataset_hash;
  std::string config_hash;
};

std::string model_to_json(const ModelFile& file);
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// FNV-1a over the canonical CSV rendering of the episodes, in order.
std::string dataset_hash(const std::vector<Episode>& episodes);

}  // namespace koopid
