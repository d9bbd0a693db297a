# Copyright 2026 The RAHC Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Hybrid adverse-weather restoration toolkit."""

import json

from ._rahc import (
    Error,
    cli,
    compose_condition,
    cosine_lr,
    derive_seed,
    enumerate_codes,
    loss_discriminator,
    loss_restoration_dis,
    make_clean_scene,
    nearest_indices,
    pixel_shuffle,
    pixel_unshuffle,
    popcount,
    psnr,
    ssim,
)
from ._rahc import default_config as _default_config


def default_config():
    """Default run configuration as a flat dict of dotted keys."""
    return json.loads(_default_config())


def run(*args):
    """Runs a subcommand and returns the parsed JSON summary line.

    Raises Error with (kind, message) when the command fails.
    """
    code, out, err = cli([str(a) for a in args])
    if code != 0:
        line = err.strip().splitlines()[0] if err.strip() else ""
        if line.startswith("error: "):
            info = json.loads(line[len("error: "):])
            raise Error(info["kind"], info["message"])
        raise Error("usage", err)
    return json.loads(out.strip().splitlines()[-1])


__all__ = [
    "Error",
    "cli",
    "compose_condition",
    "cosine_lr",
    "default_config",
    "derive_seed",
    "enumerate_codes",
    "loss_discriminator",
    "loss_restoration_dis",
    "make_clean_scene",
    "nearest_indices",
    "pixel_shuffle",
    "pixel_unshuffle",
    "popcount",
    "psnr",
    "run",
    "ssim",
]
