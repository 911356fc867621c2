#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Seeded, splittable random streams (Philox counter-based generator)."""

from typing import List

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for the sub-stream `stream` of `seed`

    Distinct stream keys give statistically independent generators, so
    per-sample or per-run draws never depend on evaluation order.
    """
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))


def split_seeds(seed: int, count: int) -> List[int]:
    """Derive `count` child integer seeds from one seed"""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]
