"""Experiment runner, file formats and the command-line interface.

File formats: datasets and results as JSON (UTF-8, sorted keys), matrices
as CSV with one leading ``#`` metadata line.  Wall times go to a separate
timings.csv so results.json is byte-identical across reruns of the same
config.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fock, kernels, shots, svm, taskgen
from .mesh import MeshConfig, product_unitary

DEFAULT_SPLIT_RATIO = 2.0 / 3.0
DEFAULT_SHOTS = shots.shot_budget_from_time()  # 10 kHz x 5 s


def derive_seed(*parts) -> int:
    """Deterministic child seed from integer parts."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def psi_for(state, modes: int) -> tuple:
    """Encoding state by name ('left', 'cent') or explicit occupations."""
    if isinstance(state, str):
        if state == "left":
            occ = [0] * modes
            occ[0] = occ[1] = 1
        elif state == "cent":
            occ = [0] * modes
            occ[modes // 2 - 1] = occ[modes // 2] = 1
        else:
            occ = [int(v) for v in state.split(",")]
        return tuple(occ)
    return tuple(int(v) for v in state)


@dataclass
class ExperimentConfig:
    modes: int = 6
    columns: int = 0
    psi: str = "cent"
    sizes: tuple = (40,)
    repeats: int = 5
    lam: float = taskgen.DEFAULT_LAMBDA
    kernels: tuple = ("quantum", "coherent")
    engine: str = "exact"
    n_shots: int = DEFAULT_SHOTS
    split_ratio: float = DEFAULT_SPLIT_RATIO
    C: float = svm.DEFAULT_C
    seed: int = 7
    out: str = "results"

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("sizes must be non-empty")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must be in (0, 1)")
        if self.engine not in ("exact", "sampled"):
            raise ValueError(f"unknown engine {self.engine!r}")

    @property
    def mesh(self) -> MeshConfig:
        return MeshConfig(self.modes, self.columns)

    @property
    def psi_state(self) -> tuple:
        return psi_for(self.psi, self.modes)

    def to_json_dict(self) -> dict:
        return {
            "modes": self.modes, "columns": self.mesh.columns,
            "psi": list(self.psi_state), "sizes": list(self.sizes),
            "repeats": self.repeats, "lambda": self.lam,
            "kernels": list(self.kernels), "engine": self.engine,
            "shots": self.n_shots if self.engine == "sampled" else None,
            "split_ratio": self.split_ratio, "C": self.C, "seed": self.seed,
        }

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        kwargs = {}
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            kwargs[key.strip()] = value.strip()
        return cls.from_strings(kwargs)

    @classmethod
    def from_strings(cls, kwargs: dict) -> "ExperimentConfig":
        conv = {
            "modes": int, "columns": int, "psi": str,
            "sizes": lambda s: tuple(int(v) for v in s.split(",")),
            "repeats": int, "lambda": float,
            "kernels": lambda s: tuple(s.split(",")),
            "engine": str, "shots": int, "split_ratio": float,
            "C": float, "seed": int, "out": str,
        }
        rename = {"lambda": "lam", "shots": "n_shots"}
        fields = {}
        for key, value in kwargs.items():
            if key not in conv:
                raise ValueError(f"unknown config key {key!r}")
            fields[rename.get(key, key)] = conv[key](value)
        return cls(**fields)


def _sampled_full_gram(points, kind, cfg, psi, r, n_shots, seed):
    """Sampled Gram plus per-pair fidelity of the post-selected distribution."""
    n = points.shape[0]
    values = np.zeros((n, n))
    np.fill_diagonal(values, 1.0)
    fidelities = []
    r_eff = kernels._kind_r(kind, r)
    for i in range(n):
        for j in range(i + 1, n):
            dist = fock.full_distribution(product_unitary(cfg, points[i], points[j]),
                                          psi, r_eff)
            record = shots.sample_counts(dist, n_shots,
                                         kernels._pair_rng_seed(seed, i, j))
            if kind == "unbunching":
                entry = shots.estimate_kernel_entry(record, psi)
            else:
                entry = record.counts.get(tuple(psi), 0) / record.total_shots
            values[i, j] = values[j, i] = entry
            mass = dist.collision_free_mass()
            total_cf = record.postselected_shots
            if mass > 0 and total_cf > 0:
                theo = {t: p / mass for t, p in dist.entries.items() if max(t) <= 1}
                emp = {t: c / total_cf for t, c in record.counts.items()}
                fidelities.append(shots.distribution_fidelity(theo, emp))
    gram = kernels.GramMatrix(values=values, kind=kind, provenance="sampled",
                              shots=n_shots, seed=seed, r=r_eff)
    return gram, fidelities


def _cell_grams(config, task, kind, r, cell_seed):
    """Train-split-ready full Gram for one (size, repeat, kernel) cell."""
    fidelities = []
    if kind in ("quantum", "coherent", "mixed", "unbunching"):
        if config.engine == "sampled":
            gram, fidelities = _sampled_full_gram(
                task.dataset.points, kind, config.mesh, config.psi_state, r,
                config.n_shots, cell_seed)
        elif kind == "quantum":
            gram = task.gram_q
        elif kind == "coherent":
            gram = task.gram_c
        else:
            gram = kernels.gram_matrix(task.dataset.points, kind,
                                       cfg=config.mesh, psi=config.psi_state, r=r)
        return gram, None, fidelities
    params = kernels.select_classical_params(kind, task.dataset.points,
                                             task.dataset.labels, C=config.C,
                                             seed=cell_seed)
    gram = kernels.gram_matrix(task.dataset.points, kind, params=params)
    return gram, params, fidelities


def _evaluate_cell(config, task, tr_idx, te_idx, kind, r, cell_seed):
    gram, params, fidelities = _cell_grams(config, task, kind, r, cell_seed)
    y = task.dataset.labels
    full = gram.values
    model = svm.train(full[np.ix_(tr_idx, tr_idx)], y[tr_idx], C=config.C)
    train_acc = svm.accuracy(svm.predict(model, full[np.ix_(tr_idx, tr_idx)]), y[tr_idx])
    test_acc = svm.accuracy(svm.predict(model, full[np.ix_(te_idx, tr_idx)]), y[te_idx])
    record = {
        "kernel": kind,
        "train_accuracy": train_acc,
        "test_accuracy": test_acc,
    }
    if r is not None:
        record["r"] = r
    if params:
        record["params"] = params
    if kind == "unbunching":
        record["gram_min_eigenvalue"] = gram.min_eigenvalue()
    if fidelities:
        record["fidelity_mean"] = float(np.mean(fidelities))
        record["fidelity_std"] = float(np.std(fidelities))
    return record


def _make_task(config, size, rep):
    task_seed = derive_seed(config.seed, size, rep, 0)
    split_seed = derive_seed(config.seed, size, rep, 1)
    task = taskgen.generate_task(config.mesh, config.psi_state, size,
                                 lam=config.lam, seed=task_seed)
    tr_idx, te_idx = svm.train_test_split(size, config.split_ratio, split_seed)
    return task, tr_idx, te_idx


def run_experiment(config: ExperimentConfig, write_files: bool = True):
    """Full grid over (size, repeat, kernel); returns the result records."""
    records = []
    timings = []
    out = Path(config.out)
    if write_files:
        out.mkdir(parents=True, exist_ok=True)
    for size in config.sizes:
        for rep in range(config.repeats):
            task, tr_idx, te_idx = _make_task(config, size, rep)
            y = task.dataset.labels
            s_kq = taskgen.model_complexity(task.gram_q, y, config.lam)
            s_kc = taskgen.model_complexity(task.gram_c, y, config.lam)
            if write_files:
                _write_json(out / f"dataset_size{size}_rep{rep}.json",
                            task.dataset.to_json_dict())
            for kind in config.kernels:
                cell_seed = derive_seed(config.seed, size, rep, 2,
                                        config.kernels.index(kind))
                t0 = time.perf_counter()
                try:
                    record = _evaluate_cell(config, task, tr_idx, te_idx,
                                            kind, None, cell_seed)
                except Exception as exc:
                    raise RuntimeError(
                        f"cell failed (size={size}, repeat={rep}, kernel={kind}): {exc}"
                    ) from exc
                record.update(size=size, repeat=rep, g_cq=task.geo.g,
                              s_kq=s_kq, s_kc=s_kc)
                records.append(record)
                timings.append((size, rep, kind, time.perf_counter() - t0))
    if write_files:
        _write_json(out / "results.json",
                    {"config": config.to_json_dict(), "records": records})
        _write_csv(out / "accuracy.csv",
                   ["size", "repeat", "kernel", "train_accuracy",
                    "test_accuracy", "g_cq"], records)
        with open(out / "timings.csv", "w") as fh:
            fh.write("size,repeat,kernel,seconds\n")
            for size, rep, kind, dt in timings:
                fh.write(f"{size},{rep},{kind},{dt:.6f}\n")
    return records


def run_width_scan(widths, sizes, repeats: int, seed: int, state: str = "cent",
                   out: str | None = None, lam: float = taskgen.DEFAULT_LAMBDA,
                   C: float = svm.DEFAULT_C):
    """Quantum/coherent accuracy versus dataset size for square meshes m = k."""
    rows = []
    for width in widths:
        if width < 2:
            raise ValueError(f"mesh width must be >= 2, got {width}")
        config = ExperimentConfig(modes=width, columns=width, psi=state,
                                  sizes=tuple(sizes), repeats=repeats, lam=lam,
                                  kernels=("quantum", "coherent"), C=C, seed=seed,
                                  out=out or "results")
        for record in run_experiment(config, write_files=False):
            rows.append({"width": width, "state": state, "size": record["size"],
                         "repeat": record["repeat"], "kernel": record["kernel"],
                         "test_accuracy": record["test_accuracy"]})
    if out is not None:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        _write_csv(path / "width_scan.csv",
                   ["width", "state", "size", "repeat", "kernel", "test_accuracy"], rows)
    return rows


def run_distinguishability_sweep(r_values, config: ExperimentConfig,
                                 write_files: bool = True):
    """Accuracy per degree of indistinguishability on the r=1-vs-r=0 task.

    Endpoints share the exact code path with the quantum and coherent rows
    of run_experiment, so under a shared seed they reproduce bit for bit.
    """
    for r in r_values:
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"r values must lie in [0, 1], got {r}")
    rows = []
    size = config.sizes[0]
    for rep in range(config.repeats):
        task, tr_idx, te_idx = _make_task(config, size, rep)
        for r in r_values:
            cell_seed = derive_seed(config.seed, size, rep, 3)
            record = _evaluate_cell(config, task, tr_idx, te_idx, "mixed",
                                    float(r), cell_seed)
            record.update(size=size, repeat=rep)
            rows.append(record)
    if write_files:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "dist_sweep.csv",
                   ["r", "size", "repeat", "kernel", "train_accuracy", "test_accuracy"],
                   rows)
    return rows


def run_unbunching_check(config: ExperimentConfig, write_files: bool = True):
    """Quantum vs unbunching vs coherent accuracy on the same tasks."""
    rows = []
    for size in config.sizes:
        for rep in range(config.repeats):
            task, tr_idx, te_idx = _make_task(config, size, rep)
            for kind in ("quantum", "unbunching", "coherent"):
                cell_seed = derive_seed(config.seed, size, rep, 4)
                record = _evaluate_cell(config, task, tr_idx, te_idx, kind,
                                        None, cell_seed)
                record.update(size=size, repeat=rep, g_cq=task.geo.g)
                rows.append(record)
    if write_files:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        fields = ["size", "repeat", "kernel", "train_accuracy", "test_accuracy",
                  "gram_min_eigenvalue"]
        _write_csv(out / "unbunch_check.csv", fields, rows)
    return rows


# ---------------------------------------------------------------------------
# persistence helpers

def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def _write_csv(path, fields, rows):
    with open(path, "w") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(str(row.get(f, "")) for f in fields) + "\n")


def write_gram_csv(path, gram: kernels.GramMatrix, psi=None, m=None, k=None):
    meta = (f"# kind={gram.kind} provenance={gram.provenance} "
            f"shots={gram.shots} seed={gram.seed}")
    if psi is not None:
        meta += f" psi={','.join(map(str, psi))} m={m} k={k}"
    with open(path, "w") as fh:
        fh.write(meta + "\n")
        for row in np.atleast_2d(gram.values):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_gram_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#"))


def emit_gram(dataset: taskgen.Dataset, kind: str, engine: str, out_prefix,
              *, n_shots: int | None = None, seed: int = 0, ratio: float | None = None,
              params: dict | None = None):
    """Write Gram CSV(s) plus a metadata JSON; round-trips losslessly.

    With ``ratio``, a train Gram and a test-vs-train cross Gram are written;
    otherwise the full N x N Gram.
    """
    cfg = MeshConfig(dataset.m, dataset.k) if dataset.m else None
    kwargs = dict(cfg=cfg, psi=dataset.psi, engine=engine, n_shots=n_shots,
                  seed=seed, params=params)
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if ratio is None:
        gram = kernels.gram_matrix(dataset.points, kind, **kwargs)
        path = prefix.with_suffix(".csv")
        write_gram_csv(path, gram, dataset.psi, dataset.m, dataset.k)
        written.append(path)
    else:
        tr_idx, te_idx = svm.train_test_split(dataset.size, ratio, seed)
        gram = kernels.gram_matrix(dataset.points[tr_idx], kind, **kwargs)
        cross = kernels.cross_gram(dataset.points[te_idx], dataset.points[tr_idx],
                                   kind, **kwargs)
        train_path = Path(f"{prefix}_train.csv")
        cross_path = Path(f"{prefix}_cross.csv")
        write_gram_csv(train_path, gram, dataset.psi, dataset.m, dataset.k)
        write_gram_csv(cross_path,
                       kernels.GramMatrix(values=cross, kind=kind,
                                          provenance=gram.provenance,
                                          shots=gram.shots, seed=seed),
                       dataset.psi, dataset.m, dataset.k)
        written.extend([train_path, cross_path])
    meta = {"kind": kind, "engine": engine, "shots": n_shots, "seed": seed,
            "psi": list(dataset.psi) if dataset.psi else None,
            "m": dataset.m, "k": dataset.k, "ratio": ratio,
            "files": [p.name for p in written]}
    meta_path = Path(f"{prefix}_meta.json")
    _write_json(meta_path, meta)
    return written + [meta_path]


# ---------------------------------------------------------------------------
# argparse surface

def _common_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=7)
    parent.add_argument("--out", type=str, default="results")
    parent.add_argument("--config", type=str, default=None,
                        help="key=value config file; flags override it")
    return parent


def _config_from_args(args, overrides: dict | None = None) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
        base = {f: getattr(config, f) for f in (
            "modes", "columns", "psi", "sizes", "repeats", "lam", "kernels",
            "engine", "n_shots", "split_ratio", "C", "seed", "out")}
    else:
        base = {}
    for key in ("seed", "out"):
        if getattr(args, key, None) is not None:
            base[key] = getattr(args, key)
    for key, value in (overrides or {}).items():
        if value is not None:
            base[key] = value
    return ExperimentConfig(**base)


def main(argv=None) -> int:
    parent = _common_parser()
    parser = argparse.ArgumentParser(prog="photonkernel",
                                     description="Photonic quantum-kernel simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-task", parents=[parent])
    p.add_argument("--modes", type=int, default=6)
    p.add_argument("--columns", type=int, default=0)
    p.add_argument("--psi", type=str, default="cent")
    p.add_argument("--size", type=int, default=40)
    p.add_argument("--lambda", dest="lam", type=float, default=taskgen.DEFAULT_LAMBDA)

    p = sub.add_parser("gram", parents=[parent])
    p.add_argument("--dataset", type=str, required=True)
    p.add_argument("--kernel", type=str, default="quantum")
    p.add_argument("--engine", type=str, default="exact")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--ratio", type=float, default=None)

    p = sub.add_parser("train", parents=[parent])
    p.add_argument("--dataset", type=str, required=True)
    p.add_argument("--kernel", type=str, default="quantum")
    p.add_argument("--engine", type=str, default="exact")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--ratio", type=float, default=DEFAULT_SPLIT_RATIO)
    p.add_argument("--C", type=float, default=svm.DEFAULT_C)

    p = sub.add_parser("experiment", parents=[parent])
    p.add_argument("--modes", type=int, default=None)
    p.add_argument("--psi", type=str, default=None)
    p.add_argument("--sizes", type=str, default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--kernels", type=str, default=None)
    p.add_argument("--engine", type=str, default=None)
    p.add_argument("--shots", type=int, default=None)

    p = sub.add_parser("width-scan", parents=[parent])
    p.add_argument("--widths", type=str, default="4,6")
    p.add_argument("--sizes", type=str, default="20,40")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--state", type=str, default="cent", choices=("left", "cent"))

    p = sub.add_parser("dist-sweep", parents=[parent])
    p.add_argument("--r-values", type=str, default="0,0.25,0.5,0.75,1")
    p.add_argument("--modes", type=int, default=None)
    p.add_argument("--psi", type=str, default=None)
    p.add_argument("--sizes", type=str, default=None)
    p.add_argument("--repeats", type=int, default=None)

    p = sub.add_parser("unbunch-check", parents=[parent])
    p.add_argument("--modes", type=int, default=None)
    p.add_argument("--psi", type=str, default=None)
    p.add_argument("--sizes", type=str, default=None)
    p.add_argument("--repeats", type=int, default=None)

    args = parser.parse_args(argv)
    out = Path(args.out)

    if args.command == "gen-task":
        cfg = MeshConfig(args.modes, args.columns)
        task = taskgen.generate_task(cfg, psi_for(args.psi, args.modes),
                                     args.size, lam=args.lam, seed=args.seed)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"dataset_size{args.size}.json"
        _write_json(path, task.dataset.to_json_dict())
        print(f"task written to {path} (g_CQ={task.geo.g:.4f})")
        return 0

    if args.command == "gram":
        dataset = taskgen.Dataset.from_json_dict(
            json.loads(Path(args.dataset).read_text()))
        out.mkdir(parents=True, exist_ok=True)
        files = emit_gram(dataset, args.kernel, args.engine, out / f"gram_{args.kernel}",
                          n_shots=args.shots if args.engine == "sampled" else None,
                          seed=args.seed, ratio=args.ratio)
        print("\n".join(str(f) for f in files))
        return 0

    if args.command == "train":
        dataset = taskgen.Dataset.from_json_dict(
            json.loads(Path(args.dataset).read_text()))
        cfg = MeshConfig(dataset.m, dataset.k)
        tr_idx, te_idx = svm.train_test_split(dataset.size, args.ratio, args.seed)
        kwargs = dict(cfg=cfg, psi=dataset.psi, engine=args.engine,
                      n_shots=args.shots if args.engine == "sampled" else None,
                      seed=args.seed)
        if args.kernel in kernels.CLASSICAL_KINDS:
            params = kernels.select_classical_params(
                args.kernel, dataset.points[tr_idx], dataset.labels[tr_idx],
                C=args.C, seed=args.seed)
            kwargs = dict(params=params)
        full = kernels.gram_matrix(dataset.points, args.kernel, **kwargs).values
        model = svm.train(full[np.ix_(tr_idx, tr_idx)], dataset.labels[tr_idx], C=args.C)
        test_acc = svm.accuracy(svm.predict(model, full[np.ix_(te_idx, tr_idx)]),
                                dataset.labels[te_idx])
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / f"model_{args.kernel}.json", model.to_json_dict())
        print(f"{args.kernel}: test accuracy {test_acc:.4f}")
        return 0

    if args.command == "experiment":
        overrides = {"modes": args.modes, "psi": args.psi, "repeats": args.repeats,
                     "engine": args.engine, "n_shots": args.shots}
        if args.sizes:
            overrides["sizes"] = tuple(int(v) for v in args.sizes.split(","))
        if args.kernels:
            overrides["kernels"] = tuple(args.kernels.split(","))
        config = _config_from_args(args, overrides)
        records = run_experiment(config)
        for record in records:
            print(f"size={record['size']} rep={record['repeat']} "
                  f"kernel={record['kernel']} test={record['test_accuracy']:.4f}")
        return 0

    if args.command == "width-scan":
        widths = [int(v) for v in args.widths.split(",")]
        sizes = [int(v) for v in args.sizes.split(",")]
        rows = run_width_scan(widths, sizes, args.repeats, args.seed,
                              state=args.state, out=args.out)
        print(f"{len(rows)} rows written to {out / 'width_scan.csv'}")
        return 0

    if args.command == "dist-sweep":
        overrides = {"modes": args.modes, "psi": args.psi, "repeats": args.repeats}
        if args.sizes:
            overrides["sizes"] = tuple(int(v) for v in args.sizes.split(","))
        config = _config_from_args(args, overrides)
        r_values = [float(v) for v in args.r_values.split(",")]
        rows = run_distinguishability_sweep(r_values, config)
        print(f"{len(rows)} rows written to {Path(config.out) / 'dist_sweep.csv'}")
        return 0

    if args.command == "unbunch-check":
        overrides = {"modes": args.modes, "psi": args.psi, "repeats": args.repeats}
        if args.sizes:
            overrides["sizes"] = tuple(int(v) for v in args.sizes.split(","))
        config = _config_from_args(args, overrides)
        rows = run_unbunching_check(config)
        print(f"{len(rows)} rows written to {Path(config.out) / 'unbunch_check.csv'}")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
