// Timing comparison of the OpenMP/FFT kernels against the serial double-sum
// reference on growing grids.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "mln/choquard.hpp"
#include "mln/fftconv.hpp"
#include "mln/forms.hpp"
#include "mln/reference.hpp"

using clock_type = std::chrono::steady_clock;

static double seconds(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
    int nthreads = omp_get_max_threads();
    if (argc > 1) nthreads = std::atoi(argv[1]);
    omp_set_num_threads(nthreads);
    mln::fftconv::init_threads(nthreads);
    std::printf("threads: %d\n", nthreads);
    std::printf("%-4s %-6s %-14s %-14s %-10s %-12s\n", "n", "m", "fft+omp [s]", "serial [s]",
                "speedup", "max |diff|");

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    struct Case {
        int n, m;
    };
    const Case cases[] = {{1, 64}, {2, 24}, {2, 48}, {3, 8}, {3, 12}, {3, 16}};
    for (const Case& c : cases) {
        mln::Grid g = mln::build_grid(c.n, 1.0, c.m);
        mln::Shape ball;
        ball.kind = mln::ShapeKind::ball;
        ball.r = 0.45;
        mln::MaskPtr mask = mln::build_domain(ball, g);
        mln::TablePtr gag = mln::gagliardo_table(g, 0.5);
        mln::Field u(mask);
        for (mln::index_t i = 0; i < mln::index_t(u.v.size()); ++i)
            u.v[i] = mask->inside[i] ? dist(rng) : 0.0;

        gag->spectrum();  // exclude one-time spectrum build from timing
        auto t0 = clock_type::now();
        double a = 0;
        const int reps = 5;
        for (int r = 0; r < reps; ++r) a = mln::gagliardo_sq(u, *gag);
        auto t1 = clock_type::now();
        double b = mln::ref::gagliardo_sq(u, *gag);
        auto t2 = clock_type::now();

        double tf = seconds(t0, t1) / reps;
        double ts = seconds(t1, t2);
        std::printf("%-4d %-6d %-14.5f %-14.5f %-10.1f %-12.3e\n", c.n, c.m, tf, ts,
                    ts / tf, std::abs(a - b));
    }
    return 0;
}
