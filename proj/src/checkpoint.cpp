#include "fhc/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fhc {

namespace {

using nlohmann::json;

json layers_to_json(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"rows", l.weight.rows()},
                      {"cols", l.weight.cols()},
                      {"weight", std::vector<double>(l.weight.data(), l.weight.data() + l.weight.size())},
                      {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  return layers;
}

Mlp layers_from_json(const MlpSpec& spec, const json& layers) {
  Mlp net = Mlp::zeros(spec);
  if (!layers.is_array() || layers.size() != net.layers().size())
    throw std::runtime_error("checkpoint layer count does not match its spec");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& dst = net.layers()[l];
    const auto w = layers[l].at("weight").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    if (layers[l].at("rows").get<Eigen::Index>() != dst.weight.rows() ||
        layers[l].at("cols").get<Eigen::Index>() != dst.weight.cols() ||
        static_cast<Eigen::Index>(w.size()) != dst.weight.size() ||
        static_cast<Eigen::Index>(b.size()) != dst.bias.size())
      throw std::runtime_error("checkpoint layer " + std::to_string(l) + " has the wrong shape");
    std::copy(w.begin(), w.end(), dst.weight.data());
    std::copy(b.begin(), b.end(), dst.bias.data());
  }
  return net;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json j;
  j["format"] = kCheckpointFormat;
  j["spec"] = {{"input_dim", ckpt.spec.input_dim},
               {"hidden_dims", ckpt.spec.hidden_dims},
               {"output_dim", ckpt.spec.output_dim},
               {"activation", "relu"},
               {"init_seed", ckpt.spec.init_seed}};
  j["run_seed"] = ckpt.run_seed;
  j["train_seed"] = ckpt.train_seed;
  j["step"] = ckpt.step;
  j["layout"] = "row-major weight (out x in) then bias, per layer";
  j["online"] = layers_to_json(ckpt.online);
  j["target"] = layers_to_json(ckpt.target);
  return j.dump(1);
}

Checkpoint checkpoint_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != kCheckpointFormat)
    throw std::runtime_error("unrecognised checkpoint format");
  try {
    MlpSpec spec;
    const auto& js = j.at("spec");
    spec.input_dim = js.at("input_dim").get<std::size_t>();
    spec.hidden_dims = js.at("hidden_dims").get<std::vector<std::size_t>>();
    spec.output_dim = js.at("output_dim").get<std::size_t>();
    spec.init_seed = js.at("init_seed").get<std::uint64_t>();
    Mlp online = layers_from_json(spec, j.at("online"));
    Mlp target = layers_from_json(spec, j.at("target"));
    return Checkpoint{spec, j.at("run_seed").get<std::uint64_t>(),
                      j.at("train_seed").get<std::uint64_t>(), j.at("step").get<std::size_t>(),
                      std::move(online), std::move(target)};
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(ckpt) << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace fhc
