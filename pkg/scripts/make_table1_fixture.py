"""Regenerate the bundled 11-VM EC2 catalog and its synthetic benchmark runs.

The VM profiles are the published EC2 instance specs. The measurements are
SYNTHETIC: plausible magnitudes driven by clock speed, core count and
instance family, with 8 noisy repeats per cell. They are not the original
2013 measurements, which were never released.
"""
import json
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parents[1] / "src" / "vmrank" / "data"

# id, vcpus, memory GiB, cost $/h, clock GHz, storage quality (1 = baseline)
VMS = [
    ("m1.xlarge", 4, 15.0, 0.480, 2.00, 0.8),
    ("m2.xlarge", 2, 17.1, 0.410, 2.40, 0.7),
    ("m2.2xlarge", 4, 34.2, 0.820, 2.40, 0.8),
    ("m2.4xlarge", 8, 68.4, 1.640, 2.40, 0.9),
    ("m3.xlarge", 4, 15.0, 0.500, 2.60, 1.6),
    ("m3.2xlarge", 8, 30.0, 1.000, 2.60, 1.7),
    ("hi1.4xlarge", 16, 60.5, 3.500, 2.40, 3.0),
    ("hs1.8xlarge", 16, 117.0, 4.600, 2.00, 2.2),
    ("cc1.4xlarge", 16, 23.0, 1.300, 2.93, 1.1),
    ("cc2.8xlarge", 32, 60.5, 2.400, 2.93, 1.2),
    ("cr1.8xlarge", 32, 244.0, 3.500, 2.60, 2.6),
]

# id, name, group, sub-group, direction, unit, parallel_scalable, base value, driver
ATTRIBUTES = [
    ("ctx_2p_16k", "context switch 2 processes / 16K", "G1", "G1_1", "lower_better", "us", False, 6.0, "clock"),
    ("ctx_2p_64k", "context switch 2 processes / 64K", "G1", "G1_1", "lower_better", "us", False, 7.5, "clock"),
    ("ctx_8p_16k", "context switch 8 processes / 16K", "G1", "G1_1", "lower_better", "us", False, 8.0, "clock"),
    ("ctx_8p_64k", "context switch 8 processes / 64K", "G1", "G1_1", "lower_better", "us", False, 11.0, "clock"),
    ("ctx_16p_16k", "context switch 16 processes / 16K", "G1", "G1_1", "lower_better", "us", False, 9.0, "clock"),
    ("ctx_16p_64k", "context switch 16 processes / 64K", "G1", "G1_1", "lower_better", "us", False, 14.0, "clock"),
    ("lat_l1", "L1 cache latency", "G1", "G1_2", "lower_better", "ns", False, 1.6, "clock"),
    ("lat_l2", "L2 cache latency", "G1", "G1_2", "lower_better", "ns", False, 5.0, "clock"),
    ("lat_main_mem", "main memory latency", "G1", "G1_2", "lower_better", "ns", False, 95.0, "memory"),
    ("lat_rand_mem", "random memory latency", "G1", "G1_2", "lower_better", "ns", False, 140.0, "memory"),
    ("lat_pipe", "pipe latency", "G2", "G2_1", "lower_better", "us", False, 18.0, "clock"),
    ("lat_unix", "AF_UNIX socket latency", "G2", "G2_1", "lower_better", "us", False, 24.0, "clock"),
    ("lat_tcp", "TCP latency", "G2", "G2_1", "lower_better", "us", False, 40.0, "clock"),
    ("bw_mem_read", "memory read bandwidth", "G2", "G2_2", "higher_better", "MB/s", False, 6500.0, "memory"),
    ("bw_mem_write", "memory write bandwidth", "G2", "G2_2", "higher_better", "MB/s", False, 5200.0, "memory"),
    ("bw_pipe", "pipe bandwidth", "G2", "G2_2", "higher_better", "MB/s", False, 1900.0, "clock"),
    ("bw_unix", "AF_UNIX socket bandwidth", "G2", "G2_2", "higher_better", "MB/s", False, 3300.0, "clock"),
    ("bw_tcp", "TCP bandwidth", "G2", "G2_2", "higher_better", "MB/s", False, 1400.0, "clock"),
    ("int_add", "integer addition time", "G3", "G3_1", "lower_better", "ns", False, 0.45, "clock"),
    ("int_mul", "integer multiplication time", "G3", "G3_1", "lower_better", "ns", False, 1.4, "clock"),
    ("int_div", "integer division time", "G3", "G3_1", "lower_better", "ns", False, 11.0, "clock"),
    ("int_mod", "integer modulus time", "G3", "G3_1", "lower_better", "ns", False, 12.0, "clock"),
    ("cpu_events", "sysbench CPU events per second", "G3", "G3_1", "higher_better", "events/s", True, 520.0, "clock"),
    ("float_add", "float addition time", "G3", "G3_2", "lower_better", "ns", False, 1.5, "clock"),
    ("float_mul", "float multiplication time", "G3", "G3_2", "lower_better", "ns", False, 2.0, "clock"),
    ("float_div", "float division time", "G3", "G3_2", "lower_better", "ns", False, 6.5, "clock"),
    ("double_add", "double addition time", "G3", "G3_2", "lower_better", "ns", False, 1.5, "clock"),
    ("double_mul", "double multiplication time", "G3", "G3_2", "lower_better", "ns", False, 2.0, "clock"),
    ("double_div", "double division time", "G3", "G3_2", "lower_better", "ns", False, 9.0, "clock"),
    ("io_seq_write_bw", "sequential block write bandwidth", "G4", "G4_1", "higher_better", "KB/s", False, 90000.0, "storage"),
    ("io_seq_read_bw", "sequential block read bandwidth", "G4", "G4_1", "higher_better", "KB/s", False, 120000.0, "storage"),
    ("io_rewrite_bw", "block rewrite bandwidth", "G4", "G4_1", "higher_better", "KB/s", False, 50000.0, "storage"),
    ("io_seq_create", "sequential creates per second", "G4", "G4_2", "higher_better", "ops/s", False, 20000.0, "storage"),
    ("io_seq_read", "sequential reads per second", "G4", "G4_2", "higher_better", "ops/s", False, 45000.0, "storage"),
    ("io_seq_delete", "sequential deletes per second", "G4", "G4_2", "higher_better", "ops/s", False, 22000.0, "storage"),
    ("io_rand_create", "random creates per second", "G4", "G4_2", "higher_better", "ops/s", False, 19000.0, "storage"),
    ("io_rand_read", "random reads per second", "G4", "G4_2", "higher_better", "ops/s", False, 40000.0, "storage"),
    ("io_rand_delete", "random deletes per second", "G4", "G4_2", "higher_better", "ops/s", False, 15000.0, "storage"),
    ("io_seeks", "random seeks per second", "G4", "G4_2", "higher_better", "seeks/s", False, 600.0, "storage"),
]

REPEATS = 8


def main(seed=2013):
    rng = np.random.default_rng(seed)
    catalog = {
        "attributes": [
            dict(id=a[0], name=a[1], aggregate_group=a[2], sub_group=a[3], direction=a[4], unit=a[5],
                 parallel_scalable=a[6])
            for a in ATTRIBUTES
        ],
        "vms": [dict(id=v[0], vcpus=v[1], memory_gib=v[2], cost_per_hour=v[3]) for v in VMS],
    }
    with open(DATA / "table1.catalog", "w") as f:
        json.dump(catalog, f, indent=2)
        f.write("\n")

    lines = ["vm_id,attribute_id,repeat_index,value"]
    for vm_id, vcpus, mem, _, clock, storage in VMS:
        vm_bias = rng.lognormal(0.0, 0.08)
        for aid, _, _, _, direction, _, _, base, driver in ATTRIBUTES:
            speed = {
                "clock": clock / 2.4,
                "memory": (clock / 2.4) ** 0.5 * (1.0 + 0.05 * np.log2(mem / 15.0)),
                "storage": storage,
            }[driver] * vm_bias * rng.lognormal(0.0, 0.1)
            centre = base * speed if direction == "higher_better" else base / speed
            for rep in range(REPEATS):
                lines.append(f"{vm_id},{aid},{rep},{centre * rng.lognormal(0.0, 0.03):.6g}")
    (DATA / "table1_synthetic_runs.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
