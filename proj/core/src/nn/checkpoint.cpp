#include "tfr/nn/checkpoint.hpp"

#include <cmath>

#include "../binary_io.hpp"

namespace tfr::nn {

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const Parameters& params) {
  detail::ByteWriter w;
  w.tag("NNCK");
  w.u64(config.digest());
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.u32(static_cast<std::uint32_t>(p.name.size()));
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (int d : p.value.shape) w.u32(static_cast<std::uint32_t>(d));
    for (double v : p.value.data) w.f32(static_cast<float>(v));
  }
  detail::write_file(path.string(), w.buffer());
}

Parameters load_checkpoint(const std::filesystem::path& path, const ModelConfig& config) {
  const auto bytes = detail::read_file(path.string());
  detail::ByteReader r(bytes, "checkpoint");
  if (r.str(4) != "NNCK") throw Error("checkpoint: bad magic in " + path.string());
  if (r.get<std::uint64_t>() != config.digest())
    throw Error("checkpoint: " + path.string() + " was saved for a different model than " +
                config.describe());

  const Model model(config);
  const Parameters layout = model.init_params(0);
  const auto count = r.get<std::uint32_t>();
  if (count != layout.size()) throw Error("checkpoint: parameter count mismatch");

  Parameters params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint32_t>();
    if (name_len > 256) throw Error("checkpoint: corrupt parameter name");
    Parameter p;
    p.name = r.str(name_len);
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw Error("checkpoint: corrupt rank");
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(r.get<std::uint32_t>());
    if (p.name != layout[i].name || shape != layout[i].value.shape)
      throw Error("checkpoint: parameter " + p.name + " does not match " + layout[i].name);
    p.value = Tensor(shape);
    p.regularized = layout[i].regularized;
    for (double& v : p.value.data) {
      v = r.get<float>();
      if (!std::isfinite(v)) throw Error("checkpoint: non-finite value in " + p.name);
    }
    params.push_back(std::move(p));
  }
  if (r.remaining() != 0) throw Error("checkpoint: trailing bytes");
  return params;
}

}  // namespace tfr::nn
