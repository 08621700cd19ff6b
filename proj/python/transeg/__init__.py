# python/transeg/__init__.py

# Copyright 2026 The transeg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Transducer / segmental model equivalence toolkit.

Label sequences are lists of integer ids into the model vocabulary.
"""

import json as _json

from ._core import (  # noqa: F401
    LM,
    DomainError,
    Error,
    GuardExceeded,
    Model,
    ParseError,
    UnreachableError,
    VersionError,
    decode,
    exact_best,
    full_sum,
    generate_model,
    s2t,
    sweep_csv,
    t2s,
    total_mass,
    wer,
)
from ._core import audit_json as _audit_json

__version__ = "0.1.0"


def audit(model, max_labels=4):
    """Oracle property suite on one model, as a dict."""
    return _json.loads(_audit_json(model, max_labels))
