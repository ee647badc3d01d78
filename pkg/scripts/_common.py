"""Shared helpers for the reproduction scripts."""

import argparse
import warnings
from pathlib import Path

from stlfunnel.scenario import load_scenario


def parser(doc, default_out):
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--out", default=default_out, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    return p


def scenario(name):
    # the practical gains deliberately break the sufficient parameter condition
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return load_scenario(name)


def outdir(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
