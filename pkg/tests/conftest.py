# SPDX-License-Identifier: GPL-3.0-or-later
"""
Shared fixtures building random MRF instances.
"""

from dataclasses import dataclass

import numpy as np
import pytest

from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
)


@dataclass
class RandomModel:
    unary: UnaryField
    feats: PixelFeatureGrid
    dp: DistanceParams
    ctx: ContextFilterBank
    tw: TripleWindow


def random_model(
    rng: np.random.Generator,
    height: int = 5,
    width: int = 4,
    num_labels: int = 3,
    num_components: int = 2,
    window: int = 3,
    context_size: int = 3,
    channels: int = 1,
    cost_scale: float = 1.0,
) -> RandomModel:
    probabilities = rng.dirichlet(np.ones(num_labels), size=(height, width))
    intensity = rng.integers(0, 256, size=(height, width, channels)).astype(float)
    dp = DistanceParams(float(rng.uniform(1e-5, 1e-4)), float(rng.uniform(0.05, 0.5)))
    costs = rng.normal(
        0.0, cost_scale, size=(num_components, num_labels, context_size, context_size, num_labels)
    )

    return RandomModel(
        unary=UnaryField(probabilities),
        feats=PixelFeatureGrid(intensity),
        dp=dp,
        ctx=ContextFilterBank(costs),
        tw=TripleWindow(window),
    )


@pytest.fixture
def make_model():
    """
    Factory of random models: make_model(rng, height=..., width=..., ...).
    """
    return random_model
