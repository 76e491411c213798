// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "pipebench/common/rng.hpp"
#include "pipebench/prefgen/dpo.hpp"

namespace {

using namespace pipebench;

void BM_DpoLoss(benchmark::State& state) {
  DeterministicRng rng(7);
  std::vector<prefgen::DpoItem> batch(static_cast<std::size_t>(state.range(0)));
  for (auto& it : batch) {
    it.logp_policy_chosen = -50.0 * rng.unit();
    it.logp_policy_rejected = -50.0 * rng.unit();
    it.logp_ref_chosen = -50.0 * rng.unit();
    it.logp_ref_rejected = -50.0 * rng.unit();
  }
  for (auto _ : state) benchmark::DoNotOptimize(prefgen::dpo_loss(batch, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DpoLoss)->Arg(64)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
