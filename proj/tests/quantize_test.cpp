// SPDX-License-Identifier: Apache-2.0
#include "dfsq/quantize.hpp"

#include "dfsq/errors.hpp"
#include "dfsq/rng.hpp"
#include "dfsq/synthetic.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace dfsq;

namespace {

std::vector<float> normalized_copy(const std::vector<float>& x, ChannelStats* stats = nullptr) {
    std::vector<float> out(x.size());
    const ChannelStats s = normalize_channel(x, out);
    if (stats) *stats = s;
    return out;
}

UniversalSet small_universal() {
    return UniversalSet::from_values({-1.0, -0.5, 0.0, 0.5, 1.0});
}

QuantPointSet point_set(std::vector<double> pts, int bits) {
    QuantPointSet set;
    set.points = std::move(pts);
    set.bitwidth = bits;
    return set;
}

} // namespace

TEST(Normalize, AlreadyCenteredUnitRange) {
    const std::vector<float> x = {-1.0f, 0.0f, 1.0f};
    ChannelStats stats;
    const auto out = normalized_copy(x, &stats);
    EXPECT_DOUBLE_EQ(stats.mean, 0.0);
    EXPECT_DOUBLE_EQ(stats.scale, 1.0);
    EXPECT_EQ(out, x);
}

TEST(Normalize, AffineShiftScale) {
    const std::vector<float> x = {2.0f, 4.0f, 6.0f};
    ChannelStats stats;
    const auto out = normalized_copy(x, &stats);
    EXPECT_DOUBLE_EQ(stats.mean, 4.0);
    EXPECT_DOUBLE_EQ(stats.scale, 2.0);
    EXPECT_EQ(out, (std::vector<float>{-1.0f, 0.0f, 1.0f}));
}

// The asymmetric case where dividing by max|x| (instead of max|x - mean|)
// would overflow the [-1, 1] range.
TEST(Normalize, AsymmetricOutlier) {
    const std::vector<float> x = {-10.0f, 8.0f, 8.0f, 8.0f};
    ChannelStats stats;
    const auto out = normalized_copy(x, &stats);
    EXPECT_DOUBLE_EQ(stats.mean, 3.5);
    EXPECT_DOUBLE_EQ(stats.scale, 13.5);
    EXPECT_FLOAT_EQ(out[0], -1.0f);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(out[i], 1.0 / 3.0, 1e-7);
}

TEST(Normalize, ConstantChannelDegenerates) {
    const std::vector<float> x = {4.25f, 4.25f, 4.25f};
    ChannelStats stats;
    const auto out = normalized_copy(x, &stats);
    EXPECT_DOUBLE_EQ(stats.mean, 4.25);
    EXPECT_DOUBLE_EQ(stats.scale, 0.0);
    EXPECT_EQ(out, (std::vector<float>{0.0f, 0.0f, 0.0f}));
}

TEST(Normalize, NonFiniteNamesIndex) {
    std::vector<float> x = {1.0f, 2.0f, std::nanf(""), 4.0f};
    std::vector<float> out(x.size());
    try {
        normalize_channel(x, out);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("element 2"), std::string::npos) << e.what();
    }
}

TEST(Normalize, RangeAndMaxInvariants) {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<float> x(1 + rng.uniform_index(300));
        for (auto& v : x) v = static_cast<float>(rng.normal(0.0, 50.0) + rng.uniform(-20, 20));
        ChannelStats stats;
        const auto out = normalized_copy(x, &stats);
        float max_abs = 0.0f;
        for (float v : out) {
            EXPECT_GE(v, -1.0f);
            EXPECT_LE(v, 1.0f);
            max_abs = std::max(max_abs, std::abs(v));
        }
        if (stats.scale > 0.0) EXPECT_EQ(max_abs, 1.0f);
    }
}

TEST(Denormalize, InverseOfNormalize) {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<float> x(1 + rng.uniform_index(100));
        for (auto& v : x) v = static_cast<float>(rng.normal(5.0, 200.0));
        ChannelStats stats;
        const auto norm = normalized_copy(x, &stats);
        std::vector<float> back(x.size());
        denormalize_channel(norm, stats.mean, stats.scale, back);
        for (std::size_t i = 0; i < x.size(); ++i)
            EXPECT_NEAR(back[i], x[i], 1e-6 * std::max(stats.scale, std::abs((double)x[i])));
    }
}

TEST(Denormalize, Examples) {
    const std::vector<float> zeros = {0.0f, 0.0f, 0.0f};
    std::vector<float> out(3);
    denormalize_channel(zeros, 4.0, 2.0, out);
    EXPECT_EQ(out, (std::vector<float>{4.0f, 4.0f, 4.0f}));

    const std::vector<float> xq = {-1.0f, 1.0f / 3.0f, 1.0f / 3.0f, 1.0f / 3.0f};
    std::vector<float> out2(4);
    denormalize_channel(xq, 3.5, 13.5, out2);
    EXPECT_NEAR(out2[0], -10.0f, 1e-5);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(out2[i], 8.0f, 1e-5);
}

TEST(Normalize, AffineInvariance) {
    Rng rng(55);
    std::vector<float> x(512);
    for (auto& v : x) v = static_cast<float>(rng.normal());
    std::vector<float> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0f * x[i] + 1.0f;

    const auto nx = normalized_copy(x);
    const auto ny = normalized_copy(y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(nx[i], ny[i], 1e-6);

    const UniversalSet uni = generate_universal_set(builtin_setting("setting1"));
    KMeansConfig kcfg;
    kcfg.seed = 4;
    const QuantPointSet px = select_points_fast(nx, uni, 3, kcfg);
    const QuantPointSet py = select_points_fast(ny, uni, 3, kcfg);
    EXPECT_EQ(px.points, py.points);
}

TEST(SqQuantize, Examples) {
    EXPECT_FLOAT_EQ(sq_quantize_value(0.4f, std::vector<double>{-1.0, 0.0, 1.0}), 0.0f);
    // Exact midpoint resolves to the smaller point.
    EXPECT_FLOAT_EQ(sq_quantize_value(0.5f, std::vector<double>{0.0, 1.0}), 0.0f);

    const QuantPointSet pts = point_set({-1.0, -0.5, 0.0, 0.5, 1.0}, 2);
    const std::vector<float> in = {-0.74f, -0.76f, 0.3f};
    std::vector<float> out(in.size());
    sq_quantize(in, pts, out);
    EXPECT_EQ(out, (std::vector<float>{-0.5f, -1.0f, 0.5f}));

    EXPECT_THROW(sq_quantize_value(0.0f, {}), ValidationError);
    std::vector<float> tmp(1);
    EXPECT_THROW(sq_quantize(in, point_set({}, 0), tmp), ValidationError);
    EXPECT_THROW(sq_quantize(in, point_set({0.5, 0.5}, 1), out), ValidationError);
}

TEST(SqQuantize, LawsOnRandomCases) {
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        std::set<double> distinct;
        const std::size_t count = 1 + rng.uniform_index(17);
        while (distinct.size() < count) distinct.insert(rng.uniform(-2.0, 2.0));
        const std::vector<double> points(distinct.begin(), distinct.end());

        const float x = static_cast<float>(rng.uniform(-3.0, 3.0));
        const float y = static_cast<float>(rng.uniform(-3.0, 3.0));
        const float qx = sq_quantize_value(x, points);
        const float qy = sq_quantize_value(y, points);

        // Idempotence, closure, per-element optimality, monotonicity.
        EXPECT_EQ(sq_quantize_value(qx, points), qx);
        EXPECT_EQ(qx, static_cast<float>(test::brute_nearest(x, points)));
        if (x <= y) EXPECT_LE(qx, qy);
    }
}

TEST(SelectFast, CentroidsAlreadyInSet) {
    const std::vector<float> data = {0.0f, 0.0f, 1.0f, 1.0f};
    KMeansConfig kcfg;
    const QuantPointSet pts = select_points_fast(data, small_universal(), 1, kcfg);
    EXPECT_EQ(pts.points, (std::vector<double>{0.0, 1.0}));
}

TEST(SelectFast, ConstantDataTriggersDuplicateRepair) {
    const std::vector<float> data(64, 0.3f);
    const UniversalSet uni = generate_universal_set(builtin_setting("setting3"));
    KMeansConfig kcfg;
    const QuantPointSet pts = select_points_fast(data, uni, 2, kcfg);
    ASSERT_EQ(pts.points.size(), 4u);
    std::set<double> distinct(pts.points.begin(), pts.points.end());
    EXPECT_EQ(distinct.size(), 4u);
    EXPECT_TRUE(std::is_sorted(pts.points.begin(), pts.points.end()));
    const double nearest = test::brute_nearest(0.3, uni.values());
    EXPECT_TRUE(distinct.count(nearest)) << nearest;
}

TEST(SelectFast, WithinFactorOfExhaustive) {
    Rng rng(100);
    std::vector<float> raw(4096);
    for (auto& v : raw) v = static_cast<float>(rng.normal());
    const auto data = normalized_copy(raw);

    const UniversalSet uni =
        evenly_spaced_subset(generate_universal_set(builtin_setting("setting1")), 9);
    KMeansConfig kcfg;
    kcfg.seed = 100;
    const QuantPointSet fast = select_points_fast(data, uni, 2, kcfg);
    const QuantPointSet exact = select_points_exhaustive(data, uni, 2);
    const double fast_loss = sq_loss(data, fast.points);
    const double exact_loss = sq_loss(data, exact.points);
    EXPECT_LE(fast_loss, 1.25 * exact_loss);
    EXPECT_GE(fast_loss, exact_loss * (1.0 - 1e-12));
}

TEST(SelectFast, RequiresEnoughUniversalPoints) {
    const std::vector<float> data = {0.0f, 1.0f};
    KMeansConfig kcfg;
    EXPECT_THROW(select_points_fast(data, small_universal(), 3, kcfg), ValidationError);
}

TEST(SelectExhaustive, TrivialAndTieCases) {
    const UniversalSet uni = UniversalSet::from_values({-1.0, 0.0, 1.0});
    const std::vector<float> pair = {-1.0f, 1.0f};
    const QuantPointSet best = select_points_exhaustive(pair, uni, 1);
    EXPECT_EQ(best.points, (std::vector<double>{-1.0, 1.0}));
    EXPECT_DOUBLE_EQ(sq_loss(pair, best.points), 0.0);

    // For x = 0.5 every 2-point subset of {-1, 0, 1} gives loss 0.25; the
    // tie goes to the lexicographically smallest sorted subset.
    const std::vector<float> half = {0.5f};
    EXPECT_DOUBLE_EQ(sq_loss(half, std::vector<double>{-1.0, 0.0}), 0.25);
    EXPECT_DOUBLE_EQ(sq_loss(half, std::vector<double>{-1.0, 1.0}), 0.25);
    EXPECT_DOUBLE_EQ(sq_loss(half, std::vector<double>{0.0, 1.0}), 0.25);
    const QuantPointSet tie = select_points_exhaustive(half, uni, 1);
    EXPECT_EQ(tie.points, (std::vector<double>{-1.0, 0.0}));
    EXPECT_DOUBLE_EQ(sq_loss(half, tie.points), 0.25);
}

TEST(SelectExhaustive, UniformSamplesHaveUniqueMinimizer) {
    Rng rng(7);
    std::vector<float> data(64);
    for (auto& v : data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    const UniversalSet uni =
        evenly_spaced_subset(generate_universal_set(builtin_setting("setting1")), 9);

    const QuantPointSet best = select_points_exhaustive(data, uni, 2);
    const double best_loss = sq_loss(data, best.points);

    // Every other subset is strictly worse (unique minimizer for this seed).
    const auto& u = uni.values();
    std::vector<std::size_t> idx = {0, 1, 2, 3};
    int strictly_worse = 0, total = 0;
    do {
        if (idx[0] < idx[1] && idx[1] < idx[2] && idx[2] < idx[3]) {
            const std::vector<double> pts = {u[idx[0]], u[idx[1]], u[idx[2]], u[idx[3]]};
            ++total;
            if (pts != best.points) {
                EXPECT_GT(sq_loss(data, pts), best_loss);
                ++strictly_worse;
            }
        }
        std::size_t j = 3;
        while (j != std::size_t(-1)) {
            if (++idx[j] < u.size()) break;
            idx[j] = 0;
            --j;
        }
        if (j == std::size_t(-1)) break;
    } while (true);
    EXPECT_EQ(total, 126);
    EXPECT_EQ(strictly_worse, 125);

    KMeansConfig kcfg;
    kcfg.seed = 7;
    const QuantPointSet fast = select_points_fast(data, uni, 2, kcfg);
    const double ratio = sq_loss(data, fast.points) / best_loss;
    EXPECT_GE(ratio, 1.0 - 1e-12);
    SUCCEED() << "fast/exhaustive loss ratio " << ratio;
}

TEST(SelectExhaustive, OracleDominatesFastSelection) {
    Rng rng(2);
    const UniversalSet uni =
        evenly_spaced_subset(generate_universal_set(builtin_setting("setting2")), 11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<float> raw(257 + rng.uniform_index(512));
        for (auto& v : raw) v = static_cast<float>(rng.normal(0.0, 2.0));
        const auto data = normalized_copy(raw);
        KMeansConfig kcfg;
        kcfg.seed = trial;
        const QuantPointSet fast = select_points_fast(data, uni, 2, kcfg);
        const QuantPointSet exact = select_points_exhaustive(data, uni, 2);
        EXPECT_LE(sq_loss(data, exact.points),
                  sq_loss(data, fast.points) * (1.0 + 1e-12));
    }
}

TEST(SelectExhaustive, BudgetRefusalReportsExactCount) {
    const UniversalSet uni =
        evenly_spaced_subset(generate_universal_set(builtin_setting("setting3")), 107);
    const std::vector<float> data = {0.0f};
    try {
        select_points_exhaustive(data, uni, 4);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("4335886749297756310"), std::string::npos) << msg;
        EXPECT_NE(msg.find("4.336e18"), std::string::npos) << msg;
    }
    // A raised budget admits the small case.
    const UniversalSet tiny = UniversalSet::from_values({-1.0, 0.0, 1.0});
    EXPECT_NO_THROW(select_points_exhaustive(data, tiny, 1, 3));
    EXPECT_THROW(select_points_exhaustive(data, tiny, 1, 2), ValidationError);
}

TEST(QuantizeTensor, FixpointWhenValuesAreRepresentable) {
    // Channels built as mean + scale * p with p in {-1, 0, 1}, all of which
    // the universal set contains.
    Tensor t = Tensor::zeros(1, 2, 2, 2);
    const float vals0[] = {2.0f, 4.0f, 6.0f, 4.0f};
    const float vals1[] = {-3.0f, 1.0f, 5.0f, 1.0f};
    std::copy(std::begin(vals0), std::end(vals0), t.channel(0, 0).begin());
    std::copy(std::begin(vals1), std::end(vals1), t.channel(0, 1).begin());

    QuantMode mode;
    KMeansConfig kcfg;
    const auto [out, report] = quantize_activation_tensor(t, small_universal(), 2, mode, kcfg);
    for (std::size_t i = 0; i < t.data.size(); ++i)
        EXPECT_NEAR(out.data[i], t.data[i], 1e-6) << i;
    EXPECT_NEAR(report.total_mse, 0.0, 1e-12);
}

TEST(QuantizeTensor, MatchesScriptedPipelineOracle) {
    Tensor t = Tensor::zeros(1, 2, 2, 2);
    const float vals0[] = {0.5f, -2.25f, 3.0f, 1.75f};
    const float vals1[] = {10.0f, 11.0f, 9.5f, -4.0f};
    std::copy(std::begin(vals0), std::end(vals0), t.channel(0, 0).begin());
    std::copy(std::begin(vals1), std::end(vals1), t.channel(0, 1).begin());

    const UniversalSet uni = generate_universal_set(builtin_setting("setting3"));
    QuantMode mode;
    KMeansConfig kcfg;
    kcfg.seed = 0;
    const auto [out, report] = quantize_activation_tensor(t, uni, 2, mode, kcfg);

    ASSERT_EQ(report.channels.size(), 2u);
    for (std::uint64_t c = 0; c < 2; ++c) {
        const auto src = t.channel(0, c);
        const auto dst = out.channel(0, c);
        const ChannelReport& ch = report.channels[c];

        // Independent recomputation of the normalize -> nearest-point ->
        // de-normalize chain, using the reported point set.
        double mean = 0.0;
        for (float v : src) mean += v;
        mean /= static_cast<double>(src.size());
        double scale = 0.0;
        for (float v : src) scale = std::max(scale, std::abs(v - mean));
        EXPECT_NEAR(ch.mean, mean, 1e-12);
        EXPECT_NEAR(ch.scale, scale, 1e-12);
        ASSERT_EQ(ch.points.size(), 4u);
        for (double p : ch.points)
            EXPECT_TRUE(std::binary_search(uni.values().begin(), uni.values().end(), p));

        double sse = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) {
            const float n = static_cast<float>((src[i] - mean) / scale);
            const double q = test::brute_nearest(n, ch.points);
            const float expected = static_cast<float>(q * scale + mean);
            EXPECT_FLOAT_EQ(dst[i], expected);
            sse += (static_cast<double>(src[i]) - expected) *
                   (static_cast<double>(src[i]) - expected);
        }
        EXPECT_NEAR(ch.sse, sse, 1e-9);
    }
}

TEST(QuantizeTensor, DeterministicAcrossRunsAndThreads) {
    const Tensor t = synthetic_tensor(2, 4, 8, 8, 21);
    const UniversalSet uni = generate_universal_set(builtin_setting("setting3"));
    QuantMode mode;
    KMeansConfig kcfg;
    kcfg.seed = 5;
    const auto [a, ra] = quantize_activation_tensor(t, uni, 4, mode, kcfg, nullptr, 1);
    const auto [b, rb] = quantize_activation_tensor(t, uni, 4, mode, kcfg, nullptr, 1);
    const auto [c, rc] = quantize_activation_tensor(t, uni, 4, mode, kcfg, nullptr, 4);
    EXPECT_EQ(a.data, b.data);
    EXPECT_EQ(a.data, c.data);
    for (std::size_t i = 0; i < ra.channels.size(); ++i) {
        EXPECT_EQ(ra.channels[i].points, rc.channels[i].points);
        EXPECT_EQ(ra.channels[i].sse, rc.channels[i].sse);
    }
}

TEST(QuantizeTensor, LayerWisePoolsSamples) {
    const Tensor t = synthetic_tensor(3, 4, 6, 6, 77);
    const UniversalSet uni = generate_universal_set(builtin_setting("setting2"));
    QuantMode mode;
    mode.channel_wise = false;
    KMeansConfig kcfg;
    const auto [out, report] = quantize_activation_tensor(t, uni, 3, mode, kcfg);
    ASSERT_EQ(report.channels.size(), 3u);
    for (const auto& ch : report.channels) EXPECT_EQ(ch.channel, -1);
}

TEST(QuantizeTensor, NoNormSkipsAffineMap) {
    Tensor t = Tensor::zeros(1, 1, 2, 2);
    t.channel(0, 0)[0] = 30.0f;
    t.channel(0, 0)[1] = -48.0f;
    t.channel(0, 0)[2] = 12.0f;
    t.channel(0, 0)[3] = 0.25f;
    const UniversalSet uni = generate_universal_set(builtin_setting("setting3"));
    QuantMode raw_mode;
    raw_mode.normalized = false;
    KMeansConfig kcfg;
    const auto [qraw, rraw] = quantize_activation_tensor(t, uni, 2, raw_mode, kcfg);
    QuantMode norm_mode;
    const auto [qnorm, rnorm] = quantize_activation_tensor(t, uni, 2, norm_mode, kcfg);

    EXPECT_DOUBLE_EQ(rraw.channels[0].mean, 0.0);
    EXPECT_DOUBLE_EQ(rraw.channels[0].scale, 1.0);
    // Raw values far outside [-1, 1] cannot be represented: severe error.
    EXPECT_GT(rraw.total_mse, 20.0 * rnorm.total_mse);
    for (float v : qraw.data) EXPECT_LE(std::abs(v), 1.0f);
}

TEST(QuantizeTensor, StaticCalibrationReusesPoints) {
    const Tensor calib = synthetic_tensor(4, 3, 8, 8, 1);
    const Tensor t = synthetic_tensor(2, 3, 8, 8, 2);
    const UniversalSet uni = generate_universal_set(builtin_setting("setting3"));
    QuantMode mode;
    mode.selection = SelectionMode::StaticCalibrated;
    KMeansConfig kcfg;
    kcfg.seed = 3;
    const CalibrationTable table = calibrate_points(calib, uni, 3, mode, kcfg);
    ASSERT_EQ(table.entries.size(), 3u);

    const auto [out, report] = quantize_activation_tensor(t, uni, 3, mode, kcfg, &table);
    for (const auto& ch : report.channels)
        EXPECT_EQ(ch.points, table.entries[static_cast<std::size_t>(ch.channel)].points);

    EXPECT_THROW(quantize_activation_tensor(t, uni, 3, mode, kcfg, nullptr), ValidationError);
    QuantMode mismatched = mode;
    mismatched.channel_wise = false;
    EXPECT_THROW(quantize_activation_tensor(t, uni, 3, mismatched, kcfg, &table),
                 ValidationError);
}

TEST(QuantizeTensor, ConstantChannelEmitsMeanExactly) {
    Tensor t = Tensor::zeros(1, 1, 2, 2);
    std::fill(t.data.begin(), t.data.end(), 7.5f);
    const UniversalSet uni = generate_universal_set(builtin_setting("setting1"));
    QuantMode mode;
    KMeansConfig kcfg;
    const auto [out, report] = quantize_activation_tensor(t, uni, 2, mode, kcfg);
    for (float v : out.data) EXPECT_EQ(v, 7.5f);
    EXPECT_DOUBLE_EQ(report.channels[0].scale, 0.0);
    EXPECT_TRUE(report.channels[0].points.empty());
    EXPECT_DOUBLE_EQ(report.total_mse, 0.0);
}

TEST(WeightQuant, ExactGridExamples) {
    const std::vector<float> w1 = {0.0f, 1.0f, 2.0f, 3.0f};
    const WeightQuantResult r1 = quantize_weight_kernel(w1, 2);
    EXPECT_DOUBLE_EQ(r1.params.step, 1.0);
    EXPECT_EQ(r1.params.zero_point, 0);
    EXPECT_EQ(r1.q, (std::vector<std::int32_t>{0, 1, 2, 3}));

    const std::vector<float> w2 = {-2.0f, -1.0f, 0.0f, 1.0f};
    const WeightQuantResult r2 = quantize_weight_kernel(w2, 2);
    EXPECT_DOUBLE_EQ(r2.params.step, 1.0);
    EXPECT_EQ(r2.params.zero_point, 2);
    EXPECT_EQ(r2.q, (std::vector<std::int32_t>{0, 1, 2, 3}));
    const std::vector<float> back = dequantize_weight_kernel(r2.q, r2.params);
    EXPECT_EQ(back, w2);
}

TEST(WeightQuant, RoundTripBound) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int bits = std::vector<int>{2, 3, 4, 8}[rng.uniform_index(4)];
        std::vector<float> w(4 + rng.uniform_index(64));
        for (auto& v : w) v = static_cast<float>(rng.normal(0.0, rng.lognormal(0.0, 1.0)));
        const WeightQuantResult r = quantize_weight_kernel(w, bits);
        if (r.params.constant_kernel) continue;
        const std::vector<float> back = dequantize_weight_kernel(r.q, r.params);
        for (std::size_t i = 0; i < w.size(); ++i)
            EXPECT_LE(std::abs(w[i] - back[i]), r.params.step / 2 + 1e-6)
                << "bits=" << bits << " i=" << i;
    }
}

TEST(WeightQuant, ConstantKernelFlagged) {
    const std::vector<float> w = {0.75f, 0.75f, 0.75f};
    const WeightQuantResult r = quantize_weight_kernel(w, 4);
    EXPECT_TRUE(r.params.constant_kernel);
    EXPECT_DOUBLE_EQ(r.params.step, 1.0);
    EXPECT_EQ(r.params.zero_point, 0);
    EXPECT_EQ(r.q, (std::vector<std::int32_t>{0, 0, 0}));
}

TEST(WeightQuant, Validation) {
    const std::vector<float> w = {0.0f, 1.0f};
    EXPECT_THROW(quantize_weight_kernel(w, 1), ValidationError);
    EXPECT_THROW(quantize_weight_kernel({}, 4), ValidationError);
    const std::vector<float> bad = {0.0f, std::numeric_limits<float>::infinity()};
    EXPECT_THROW(quantize_weight_kernel(bad, 4), ValidationError);

    WeightQuantParams p;
    p.step = 1.0;
    p.zero_point = 2;
    p.bitwidth = 2;
    const std::vector<std::int32_t> codes = {0, 1, 2, 3};
    EXPECT_EQ(dequantize_weight_kernel(codes, p),
              (std::vector<float>{-2.0f, -1.0f, 0.0f, 1.0f}));
    const std::vector<std::int32_t> all_z = {2, 2};
    EXPECT_EQ(dequantize_weight_kernel(all_z, p), (std::vector<float>{0.0f, 0.0f}));
    const std::vector<std::int32_t> oob = {4};
    EXPECT_THROW(dequantize_weight_kernel(oob, p), ValidationError);
}

TEST(MinMax, ExactLevels) {
    Tensor t = Tensor::zeros(1, 1, 16, 16);
    for (std::size_t i = 0; i < 256; ++i) t.data[i] = static_cast<float>(i);
    const auto [out, report] = minmax_uniform_activation(t, 8);
    EXPECT_EQ(out.data, t.data);
    EXPECT_FALSE(report.constant_tensor);

    Tensor t2 = Tensor::zeros(1, 1, 1, 2);
    t2.data = {-1.0f, 1.0f};
    const auto [out2, report2] = minmax_uniform_activation(t2, 2);
    EXPECT_DOUBLE_EQ(report2.step, 2.0 / 3.0);
    EXPECT_EQ(out2.data, (std::vector<float>{-1.0f, 1.0f}));

    Tensor t3 = Tensor::zeros(1, 1, 1, 4);
    t3.data = {-1.0f, -0.4f, 0.2f, 1.0f};
    const auto [out3, r3] = minmax_uniform_activation(t3, 2);
    const double s = 2.0 / 3.0;
    EXPECT_FLOAT_EQ(out3.data[0], -1.0f);
    EXPECT_FLOAT_EQ(out3.data[1], static_cast<float>(-1.0 + s));
    EXPECT_FLOAT_EQ(out3.data[2], static_cast<float>(-1.0 + 2 * s));
    EXPECT_FLOAT_EQ(out3.data[3], 1.0f);
}

TEST(MinMax, ConstantTensorIdentity) {
    Tensor t = Tensor::zeros(1, 1, 2, 2);
    std::fill(t.data.begin(), t.data.end(), 3.0f);
    const auto [out, report] = minmax_uniform_activation(t, 4);
    EXPECT_EQ(out.data, t.data);
    EXPECT_TRUE(report.constant_tensor);
}

TEST(MinMax, SubsetQuantizationWinsOnHeavyTail) {
    Tensor t = Tensor::zeros(1, 4, 32, 32);
    for (std::uint64_t c = 0; c < 4; ++c) {
        Rng rng(derive_seed(3, 0, c));
        const auto vals = lognormal_centered(rng, t.channel_size());
        std::copy(vals.begin(), vals.end(), t.channel(0, c).begin());
    }
    const UniversalSet uni = generate_universal_set(builtin_setting("setting3"));
    QuantMode mode;
    KMeansConfig kcfg;
    kcfg.seed = 3;
    const auto [qd, rd] = quantize_activation_tensor(t, uni, 4, mode, kcfg);
    const auto [qm, rm] = minmax_uniform_activation(t, 4);

    double mse_minmax = 0.0;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        const double d = static_cast<double>(t.data[i]) - static_cast<double>(qm.data[i]);
        mse_minmax += d * d;
    }
    mse_minmax /= static_cast<double>(t.data.size());
    EXPECT_LT(rd.total_mse, mse_minmax);
}
