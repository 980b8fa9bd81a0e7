#include "xylreg/archive.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"
#include "xylreg/error.hpp"

namespace xylreg {

namespace {

using nlohmann::json;

constexpr std::string_view kFormatName = "xylreg-model";

FeatureVector feature_vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != kFeatureCount) {
    throw Error(ErrorCode::BadArchive, "expected " + std::to_string(kFeatureCount) +
                                           " feature values, found " +
                                           std::to_string(v.size()));
  }
  return to_feature_vector(v);
}

json standardizer_to_json(const Standardizer& s) {
  return {{"means", s.means()}, {"stddevs", s.stddevs()}};
}

Standardizer standardizer_from(const json& j) {
  return Standardizer(feature_vector_from(j.at("means")),
                      feature_vector_from(j.at("stddevs")));
}

struct Encoded {
  std::string kind;
  const Standardizer* standardizer;
  json parameters;
};

Encoded encode(const Model& model) {
  if (const auto* lm = std::get_if<LinearModel>(&model)) {
    return {"linear", &lm->standardizer,
            {{"weights", lm->weights},
             {"intercept", lm->intercept},
             {"ridge", lm->ridge},
             {"ridge_fallback", lm->ridge_fallback}}};
  }
  if (const auto* gm = std::get_if<GrnnModel>(&model)) {
    return {"grnn", &gm->standardizer(),
            {{"sigma", gm->sigma()},
             {"patterns", gm->patterns()},
             {"targets", gm->targets()}}};
  }
  const auto& mm = std::get<MlfnModel>(model);
  return {"mlfn", &mm.standardizer(),
          {{"hidden", mm.hidden_count()},
           {"parameter_count", mm.parameter_count()},
           {"w1", mm.w1()},
           {"b1", mm.b1()},
           {"w2", mm.w2()},
           {"b2", mm.b2()},
           {"target_scaler",
            {{"mean", mm.target_scaler().mean}, {"stddev", mm.target_scaler().stddev}}}}};
}

Model decode(const std::string& kind, const json& p, Standardizer standardizer) {
  if (kind == "linear") {
    LinearModel lm;
    lm.weights = feature_vector_from(p.at("weights"));
    lm.intercept = p.at("intercept").get<double>();
    lm.ridge = p.at("ridge").get<double>();
    lm.ridge_fallback = p.at("ridge_fallback").get<bool>();
    lm.standardizer = std::move(standardizer);
    return lm;
  }
  if (kind == "grnn") {
    std::vector<FeatureVector> patterns;
    for (const auto& row : p.at("patterns")) patterns.push_back(feature_vector_from(row));
    return GrnnModel(std::move(patterns), p.at("targets").get<std::vector<double>>(),
                     p.at("sigma").get<double>(), std::move(standardizer));
  }
  if (kind == "mlfn") {
    const auto& ts = p.at("target_scaler");
    return MlfnModel(p.at("hidden").get<std::size_t>(),
                     p.at("w1").get<std::vector<double>>(),
                     p.at("b1").get<std::vector<double>>(),
                     p.at("w2").get<std::vector<double>>(), p.at("b2").get<double>(),
                     std::move(standardizer),
                     TargetScaler{ts.at("mean").get<double>(), ts.at("stddev").get<double>()});
  }
  throw Error(ErrorCode::BadArchive, "unknown model kind '" + kind + "'");
}

}  // namespace

std::string serialize(const ModelArchive& archive) {
  const auto enc = encode(archive.model);
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = archive.version;
  doc["kind"] = enc.kind;
  doc["target"] = column_name(archive.target);
  doc["feature_names"] = feature_column_names();
  doc["standardizer"] = standardizer_to_json(*enc.standardizer);
  doc["parameters"] = enc.parameters;
  doc["metadata"] = {{"seed", archive.metadata.seed},
                     {"model_spec", archive.metadata.model_spec},
                     {"config", archive.metadata.config},
                     {"dataset_fingerprint", archive.metadata.dataset_fingerprint},
                     {"trained_rows", archive.metadata.trained_rows}};
  return doc.dump(2) + "\n";
}

ModelArchive deserialize(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormatName) {
      throw Error(ErrorCode::BadArchive, "not a model archive");
    }
    ModelArchive archive;
    archive.version = doc.at("version").get<int>();
    if (archive.version != kArchiveVersion) {
      throw Error(ErrorCode::BadArchive,
                  "unsupported archive version " + std::to_string(archive.version));
    }
    const auto target = parse_target(doc.at("target").get<std::string>());
    if (!target) throw Error(ErrorCode::BadArchive, "unknown target in archive");
    archive.target = *target;

    const auto names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& expected = feature_column_names();
    if (!std::equal(names.begin(), names.end(), expected.begin(), expected.end())) {
      throw Error(ErrorCode::ArityMismatch,
                  "archive has " + std::to_string(names.size()) +
                      " feature columns that do not match the " +
                      std::to_string(kFeatureCount) + " known ones");
    }

    archive.model = decode(doc.at("kind").get<std::string>(), doc.at("parameters"),
                           standardizer_from(doc.at("standardizer")));

    const auto& meta = doc.at("metadata");
    archive.metadata.seed = meta.at("seed").get<std::uint64_t>();
    archive.metadata.model_spec = meta.at("model_spec").get<std::string>();
    archive.metadata.config =
        meta.at("config").get<std::map<std::string, std::string>>();
    archive.metadata.dataset_fingerprint =
        meta.at("dataset_fingerprint").get<std::string>();
    archive.metadata.trained_rows = meta.at("trained_rows").get<std::size_t>();
    return archive;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ArityMismatch) throw;
    throw Error(ErrorCode::BadArchive, std::string("invalid archive: ") + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadArchive, std::string("invalid archive: ") + e.what());
  }
}

void save_archive(const std::filesystem::path& path, const ModelArchive& archive) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << serialize(archive);
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

ModelArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  return deserialize(text);
}

}  // namespace xylreg
