// Microbenchmarks for the hot paths: mask warping, IoU scoring, reply
// parsing and compositing. Run with --benchmark_filter=... to focus.

#include <benchmark/benchmark.h>

#include <string>

#include "objedit/compositor.hpp"
#include "objedit/geometry.hpp"
#include "objedit/image.hpp"
#include "objedit/llmproto.hpp"
#include "objedit/rng.hpp"

using namespace objedit;
using geometry::AffineTransform;
using geometry::BinaryMask;

namespace {

BinaryMask disk(int w, int h, double cx, double cy, double r) {
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
            if (dx * dx + dy * dy <= r * r) m.set(x, y, true);
        }
    return m;
}

AffineTransform awkward() {
    AffineTransform t = geometry::about_anchor(
        geometry::compose(AffineTransform::rotate_degrees(17),
                          AffineTransform::scale(1.2, 0.9)),
        {320, 240});
    return geometry::compose(AffineTransform::translate(41, -23), t);
}

void bm_warp_mask(benchmark::State& state) {
    const int side = int(state.range(0));
    BinaryMask m = disk(side, side, side / 2.0, side / 2.0, side / 3.0);
    AffineTransform t = awkward();
    for (auto _ : state) benchmark::DoNotOptimize(geometry::warp_mask(m, t));
    state.SetItemsProcessed(state.iterations() * int64_t(side) * side);
}
BENCHMARK(bm_warp_mask)->Arg(64)->Arg(256)->Arg(640);

void bm_mask_iou(benchmark::State& state) {
    const int side = int(state.range(0));
    BinaryMask a = disk(side, side, side * 0.45, side * 0.5, side / 3.0);
    BinaryMask b = disk(side, side, side * 0.55, side * 0.5, side / 3.0);
    for (auto _ : state) benchmark::DoNotOptimize(geometry::mask_iou(a, b));
    state.SetItemsProcessed(state.iterations() * int64_t(side) * side);
}
BENCHMARK(bm_mask_iou)->Arg(256)->Arg(640);

void bm_parse_reasoner_reply(benchmark::State& state) {
    std::string reply =
        "After weighing the layout carefully, the object should glide left.\n" +
        llmproto::render_reasoner_reply(awkward(), 7) +
        "\nThat placement keeps the composition balanced.";
    for (auto _ : state) benchmark::DoNotOptimize(llmproto::parse_reasoner_reply(reply));
    state.SetBytesProcessed(state.iterations() * int64_t(reply.size()));
}
BENCHMARK(bm_parse_reasoner_reply);

void bm_composite(benchmark::State& state) {
    const int w = 640, h = 480;
    image::Image img(w, h);
    rng::SplitMix64 g(5);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t* p = img.pixel(x, y);
            p[0] = std::uint8_t(x & 0xff);
            p[1] = std::uint8_t(y & 0xff);
            p[2] = std::uint8_t(g.below(256));
        }
    BinaryMask before = disk(w, h, 300, 240, 90);
    AffineTransform t = awkward();
    const auto fill = state.range(0) == 0 ? compositor::FillMode::BoundaryMean
                                          : compositor::FillMode::Noise;
    for (auto _ : state)
        benchmark::DoNotOptimize(compositor::composite(img, before, t, fill, 11));
}
BENCHMARK(bm_composite)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
