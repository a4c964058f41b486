#!/usr/bin/env python3
"""Measure per-point filter cost: median predict+update latency.

The whole point of sparse keyframing is that the filter is effectively
free next to a deep tracker call; this prints the actual numbers.
"""

import time

import numpy as np

from ktrack.kalman import KalmanParams, init_filter, measurement_model, motion_model, predict, update


def main():
    params = KalmanParams()
    motion, meas = motion_model(params), measurement_model(params)

    state = init_filter(100.0, 50.0, params)
    for k in range(500):
        state = predict(state, motion)
        state = update(state, 100.0 + k, 50.0, meas, k)

    samples = []
    state = init_filter(100.0, 50.0, params)
    for k in range(10_000):
        t0 = time.perf_counter_ns()
        state = predict(state, motion)
        state = update(state, 100.0 + 0.1 * k, 50.0, meas, k)
        samples.append(time.perf_counter_ns() - t0)

    arr = np.array(samples, dtype=float) / 1000.0
    print(f"predict+update per point: median {np.median(arr):.1f} us, "
          f"p90 {np.percentile(arr, 90):.1f} us, p99 {np.percentile(arr, 99):.1f} us")
    per_frame_100pts = np.median(arr) * 100 / 1000.0
    print(f"=> {per_frame_100pts:.2f} ms per frame for 100 points, vs ~556 ms per tracker call")


if __name__ == "__main__":
    main()
