#!/usr/bin/env python3
"""Train a binary-weight model on the bump-function benchmark and compare the
full-precision reference path against the emulated fixed-point datapath.

Run: python demos/02_train_and_compare.py
"""

import warnings

import scmfpga as s

warnings.filterwarnings("ignore", message="clamped")

SEED = 7

print("generating the univariate bump dataset (1000 train / 300 test)...")
ds = s.split(s.gen_db1(seed=SEED), 0.2, seed=SEED)
spec = s.parse_encoding("s2v2")

data = s.prepare_train_data(
    ds.x_norm(ds.train_idx), ds.y[ds.train_idx],
    ds.x_norm(ds.val_idx), ds.y[ds.val_idx], spec,
)

print("training: 60 nodes, 500 candidates per attempt, step activation...")
cfg = s.TrainConfig.single_layer(60, s.Activation.STEP, t_max=500, seed=SEED)
result = s.train(data, cfg)
model = result.model
print(f"  built layers {model.layer_sizes}; last log line:")
print(f"  {result.records[-1].to_kv()}")

print()
print("evaluating the held-out rows on both paths...")
bits_test, _ = s.encode_matrix(ds.x_norm(ds.test_idx), spec)
rep = s.evaluate_bits(model, bits_test, ds.y[ds.test_idx], "both")
print(f"  reference (float64) test RMSE : {rep.rmse_pc:.9f}")
print(f"  emulated (Q7.25)   test RMSE : {rep.rmse_fpga:.9f}")
print(f"  |difference|                  : {rep.rmse_difference:.3e}")
print(f"  worst per-sample |delta|      : {rep.max_output_delta:.3e}")
print(f"  analytic rounding bound       : {s.quantization_bound(model):.3e}")

print()
print("a few samples side by side (target / reference / emulated):")
for i in range(5):
    t = ds.y[ds.test_idx][i, 0]
    pc = rep.outputs_pc[i, 0]
    fp = rep.outputs_fpga[i, 0]
    print(f"  {t: .8f}   {pc: .8f}   {fp: .8f}")
