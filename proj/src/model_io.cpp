// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/model_io.hpp"

#include <cstdio>

#include <json.hpp>

#include "koopid/error.hpp"
#include "koopid/io.hpp"

namespace koopid {

using Json = nlohmann::ordered_json;

namespace {

Json matrix_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix matrix_from(const Json& j, Eigen::Index rows, Eigen::Index cols,
                   const char* what) {
  KOOPID_CHECK(j.is_array() && static_cast<Eigen::Index>(j.size()) == rows,
               ErrorCode::kIo, std::string("model: bad row count for ") + what);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& r = j[i];
    KOOPID_CHECK(r.is_array() && static_cast<Eigen::Index>(r.size()) == cols,
                 ErrorCode::kIo,
                 std::string("model: bad column count for ") + what);
    for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = r[c].get<double>();
  }
  return M;
}

Json lifting_json(const LiftingSpec& s) {
  Json j;
  j["state_dim"] = s.state_dim;
  j["input_dim"] = s.input_dim;
  j["monomial_degree"] = s.monomial_degree;
  j["rbf_count"] = s.rbf_count;
  j["alpha"] = s.alpha;
  j["delta"] = s.delta;
  j["include_raw_states"] = s.include_raw_states;
  j["center_seed"] = s.center_seed;
  j["ordering_version"] = s.ordering_version;
  Json centers = Json::array();
  for (const Vector& c : s.rbf_centers) {
    centers.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  }
  j["rbf_centers"] = std::move(centers);
  return j;
}

LiftingSpec lifting_from(const Json& j) {
  LiftingSpec s;
  s.state_dim = j.at("state_dim").get<int>();
  s.input_dim = j.at("input_dim").get<int>();
  s.monomial_degree = j.at("monomial_degree").get<int>();
  s.rbf_count = j.at("rbf_count").get<int>();
  s.alpha = j.at("alpha").get<double>();
  s.delta = j.at("delta").get<double>();
  s.include_raw_states = j.at("include_raw_states").get<bool>();
  s.center_seed = j.at("center_seed").get<std::uint64_t>();
  s.ordering_version = j.at("ordering_version").get<std::string>();
  for (const Json& c : j.at("rbf_centers")) {
    const auto v = c.get<std::vector<double>>();
    s.rbf_centers.push_back(Eigen::Map<const Vector>(v.data(), v.size()));
  }
  return s;
}

Json stability_json(const StabilitySolution& s) {
  Json j;
  j["combined"] = s.combined;
  j["status"] = s.solver_status;
  j["iterations"] = s.iterations;
  j["gap"] = s.gap;
  j["gamma"] = s.gamma;
  j["nu"] = s.nu;
  j["epsilon"] = s.epsilon;
  j["strict_margin"] = s.strict_margin;
  Json m = Json::object();
  for (const auto& c : s.margins) m[c.name] = c.value;
  j["margins"] = std::move(m);
  j["forward_lmi_margin"] = s.forward_lmi_margin;
  if (s.combined) {
    j["backward_quadratic_margin"] = s.backward_quadratic_margin;
    j["backward_linearized_margin"] = s.backward_linearized_margin;
  }
  j["P"] = matrix_json(s.P);
  return j;
}

StabilitySolution stability_from(const Json& j, Eigen::Index pt) {
  StabilitySolution s;
  s.combined = j.at("combined").get<bool>();
  s.solver_status = j.at("status").get<std::string>();
  s.iterations = j.at("iterations").get<int>();
  s.gap = j.at("gap").get<double>();
  s.gamma = j.at("gamma").get<double>();
  s.nu = j.at("nu").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  s.strict_margin = j.at("strict_margin").get<double>();
  for (const auto& [name, v] : j.at("margins").items()) {
    s.margins.push_back({name, v.get<double>()});
  }
  s.forward_lmi_margin = j.at("forward_lmi_margin").get<double>();
  if (s.combined) {
    s.backward_quadratic_margin = j.at("backward_quadratic_margin").get<double>();
    s.backward_linearized_margin =
        j.at("backward_linearized_margin").get<double>();
  }
  s.P = matrix_from(j.at("P"), pt, pt, "P");
  return s;
}

Json combine_json(const CombineReport& r) {
  Json j;
  j["sqrt_residual"] = r.sqrt_residual;
  j["discarded_imag"] = r.discarded_imag;
  j["spectral_radius"] = r.spectral_radius;
  j["abb_condition"] = r.abb_condition;
  j["rank_deficient"] = r.rank_deficient;
  return j;
}

CombineReport combine_from(const Json& j) {
  CombineReport r;
  r.sqrt_residual = j.at("sqrt_residual").get<double>();
  r.discarded_imag = j.at("discarded_imag").get<double>();
  r.spectral_radius = j.at("spectral_radius").get<double>();
  r.abb_condition = j.at("abb_condition").get<double>();
  r.rank_deficient = j.at("rank_deficient").get<bool>();
  return r;
}

}  // namespace

std::string model_to_json(const ModelFile& f) {
  const KoopmanModel& m = f.model;
  m.validate();
  Json j;
  j["format"] = "koopid-model";
  j["version"] = kModelFormatVersion;
  j["method"] = method_name(m.method);
  j["dims"] = {{"m", m.spec.state_dim},
               {"n", m.spec.input_dim},
               {"p_theta", m.spec.lifted_state_dim()},
               {"p_upsilon", m.spec.lifted_input_dim()}};
  j["A"] = matrix_json(m.A);
  j["B"] = matrix_json(m.B);
  j["lifting"] = lifting_json(m.spec);
  if (f.stability) j["stability"] = stability_json(*f.stability);
  if (f.combine) j["combine"] = combine_json(*f.combine);
  j["provenance"] = {{"dataset_hash", f.dataset_hash},
                     {"config_hash", f.config_hash}};
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  ModelFile f;
  try {
    const Json j = Json::parse(text);
    KOOPID_CHECK(j.at("format").get<std::string>() == "koopid-model",
                 ErrorCode::kIo, "model: not a koopid model file");
    const int version = j.at("version").get<int>();
    KOOPID_CHECK(version == kModelFormatVersion, ErrorCode::kIo,
                 "model: unsupported format version " + std::to_string(version));
    const auto method = parse_method(j.at("method").get<std::string>());
    KOOPID_CHECK(method.has_value(), ErrorCode::kIo, "model: unknown method tag");
    f.model.method = *method;
    f.model.spec = lifting_from(j.at("lifting"));
    f.model.spec.validate();
    const Json& d = j.at("dims");
    const int pt = f.model.spec.lifted_state_dim();
    const int pu = f.model.spec.lifted_input_dim();
    KOOPID_CHECK(d.at("p_theta").get<int>() == pt &&
                     d.at("p_upsilon").get<int>() == pu &&
                     d.at("m").get<int>() == f.model.spec.state_dim &&
                     d.at("n").get<int>() == f.model.spec.input_dim,
                 ErrorCode::kIo, "model: dims disagree with the lifting");
    f.model.A = matrix_from(j.at("A"), pt, pt, "A");
    f.model.B = matrix_from(j.at("B"), pt, pu, "B");
    if (j.contains("stability")) f.stability = stability_from(j["stability"], pt);
    if (j.contains("combine")) f.combine = combine_from(j["combine"]);
    const Json& p = j.at("provenance");
    f.dataset_hash = p.at("dataset_hash").get<std::string>();
    f.config_hash = p.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kIo, std::string("model: ") + ex.what());
  }
  f.model.validate();
  return f;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(file));
}

ModelFile load_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

std::string dataset_hash(const std::vector<Episode>& episodes) {
  std::uint64_t h = fnv1a("");
  for (const Episode& e : episodes) {
    h = fnv1a(e.id, h);
    h = fnv1a(episode_to_csv(e), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace koopid
