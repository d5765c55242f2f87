#include <benchmark/benchmark.h>

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "paththerm/cme.hpp"
#include "paththerm/generator.hpp"
#include "paththerm/presets.hpp"
#include "paththerm/rng.hpp"
#include "paththerm/ssa.hpp"
#include "paththerm/state_box.hpp"

using namespace paththerm;

namespace {

struct Built {
  NetworkPtr network;
  std::shared_ptr<const Generator> generator;
  State x0;
};

Built build(const std::string& name, const ParameterMap& params = {}, std::optional<State> upper = {}) {
  auto preset = preset_model(name, params);
  Built b;
  b.network = std::make_shared<const ReactionNetwork>(std::move(preset.network));
  b.x0 = preset.initial_state;
  const auto box = make_box(*b.network, upper ? *upper : preset.box_upper, b.x0);
  b.generator = std::make_shared<const Generator>(build_generator(b.network, box));
  return b;
}

void BM_SsaEvents(benchmark::State& state) {
  const auto b = build("schlogl");
  const auto mode = state.range(0) == 0 ? SsaMode::direct : SsaMode::two_stage;
  constexpr std::size_t events = 100'000;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    RngStream rng(1, stream++);
    const auto traj = simulate(b.network, b.x0, std::numeric_limits<double>::infinity(), rng, mode, events);
    benchmark::DoNotOptimize(traj.event_count());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * events));
  state.SetLabel(to_string(mode));
}
BENCHMARK(BM_SsaEvents)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Stationary(benchmark::State& state) {
  const auto n = state.range(1);
  const auto b = build("driven_cycle", {{"n", static_cast<double>(n)}});
  StationaryOptions options;
  options.method = state.range(0) == 0 ? StationaryMethod::gth : StationaryMethod::sparse_lu;
  for (auto _ : state) benchmark::DoNotOptimize(stationary(*b.generator, options));
  state.SetLabel((options.method == StationaryMethod::gth ? "gth, states=" : "sparse_lu, states=") +
                 std::to_string(b.generator->size()));
}
BENCHMARK(BM_Stationary)->ArgsProduct({{0, 1}, {20, 60}})->Unit(benchmark::kMillisecond);

void BM_Transient(benchmark::State& state) {
  const auto b = build("schlogl");
  const auto p0 = Distribution::delta(b.generator->box_ptr(), b.x0);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transient(*b.generator, p0, t));
  state.SetLabel("t=" + std::to_string(state.range(0)));
}
BENCHMARK(BM_Transient)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
