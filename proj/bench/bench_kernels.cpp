// Times the OpenMP kernels against their serial references on planted-scale
// data: per-batch gradient computation and filtered ranking.

#include <chrono>
#include <cstdio>

#include "kbregex/fixtures.hpp"
#include "kbregex/parallel.hpp"
#include "kbregex/training.hpp"

using namespace kbregex;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int workers = argc > 1 ? std::atoi(argv[1]) : hardware_workers();
    std::printf("planted fixture, %d worker(s) vs serial reference\n", workers);

    PlantedFixture f = make_planted(1, 20);
    ModelParams params = init_params(ModelKind::RotateBox, 16, f.kb.num_entities(),
                                     f.kb.num_relations(), 0.2, 6.0, 1);
    TrainConfig cfg;
    cfg.kind = ModelKind::RotateBox;
    cfg.variant = Variant::Comp;
    cfg.dim = 16;
    cfg.gamma = 6.0;
    cfg.negatives = 32;
    cfg.seed = 1;

    std::vector<TrainPair> batch;
    std::vector<uint64_t> seeds;
    for (size_t qi = 0; qi < f.queries.train.size() && batch.size() < 512; ++qi) {
        for (EntId a : f.queries.train[qi].answers) {
            if (batch.size() >= 512) break;
            batch.push_back({static_cast<int>(qi), a});
            seeds.push_back(mix_stream(1, "bench", batch.size()));
        }
    }

    const int reps = 5;
    double serial_ms = 0, parallel_ms = 0;
    for (int rep = 0; rep < reps; ++rep) {
        GradSink sink(params.ps);
        auto t0 = std::chrono::steady_clock::now();
        (void)batch_gradients_serial(f.kb, params, f.queries.train, batch, seeds, cfg,
                                     NegMode::Uniform, sink);
        serial_ms += ms_since(t0);

        GradSink sink2(params.ps);
        t0 = std::chrono::steady_clock::now();
        (void)batch_gradients(f.kb, params, f.queries.train, batch, seeds, cfg, NegMode::Uniform,
                              sink2, workers);
        parallel_ms += ms_since(t0);
    }
    std::printf("batch gradients (%zu elements): serial %.1f ms, parallel %.1f ms, speedup %.2fx\n",
                batch.size(), serial_ms / reps, parallel_ms / reps, serial_ms / parallel_ms);

    serial_ms = parallel_ms = 0;
    for (int rep = 0; rep < reps; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        auto a = rank_all_pairs_serial(f.kb, params, Variant::Comp, f.queries.test);
        serial_ms += ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        auto b = rank_all_pairs(f.kb, params, Variant::Comp, f.queries.test, workers);
        parallel_ms += ms_since(t0);
        if (a.size() != b.size()) {
            std::printf("kernel mismatch!\n");
            return 1;
        }
    }
    size_t pairs = rank_all_pairs_serial(f.kb, params, Variant::Comp, f.queries.test).size();
    std::printf("filtered ranking (%zu pairs): serial %.1f ms, parallel %.1f ms, speedup %.2fx\n",
                pairs, serial_ms / reps, parallel_ms / reps, serial_ms / parallel_ms);
    return 0;
}
