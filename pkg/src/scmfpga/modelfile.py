"""Binary model file and the JSON interchange form.

Layout (all little-endian):

    magic "SCMB" | version u16 | flags u8 (bit0: float sidecar present)
    encoding kind u8 | encoding param u8 | n_outputs u16 | d_enc u32
    mechanism: source u8 (0 lasso / 1 external) | alpha f64
               | weights i32 x (d_enc*m) | intercepts i32 x m
    layer count u16, then per layer:
        activation u8 | node count u32 | fan_in u32
        | packed weight bits, node-major, rows padded to 64-bit words
        | scale codes u8 x n (values 0..7) | biases i32 x n
        | readouts i32 x (n*m), node-major then output-major
    float sidecar (when flagged): mechanism weights f64 x (d_enc*m),
        intercepts f64 x m, then per layer biases f64 x n, readouts f64 x n*m
    crc32 u32 over everything before it

All i32 fields are raw Q7.25. The sidecar carries the original training-time
float values so the reference evaluator does not have to reconstruct them
from the quantized fields; without it, loads fall back to raw / 2**25.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from . import fixedpoint as fx
from .bits import BitVec
from .encoding import EncodingKind, EncodingSpec
from .errors import ModelFormatError
from .mechanism import SOURCE_EXTERNAL, SOURCE_LASSO, MechanismModel
from .model import Activation, ScmLayer, ScmModel, ScmNode

MAGIC = b"SCMB"
VERSION = 1
FLAG_FLOAT_SIDECAR = 1

_SOURCE_TAGS = {SOURCE_LASSO: 0, SOURCE_EXTERNAL: 1}
_SOURCE_NAMES = {v: k for k, v in _SOURCE_TAGS.items()}


def _i32_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<i4").tobytes()


def _f64_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def model_to_bytes(model: ScmModel, include_floats: bool = True) -> bytes:
    model.validate()
    m = model.n_outputs
    mech = model.mechanism
    flags = FLAG_FLOAT_SIDECAR if include_floats else 0
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HB", VERSION, flags)
    out += model.encoding.to_bytes()
    out += struct.pack("<HI", m, model.d_enc)
    out += struct.pack("<Bd", _SOURCE_TAGS[mech.source], float(mech.alpha))
    out += _i32_bytes(mech.weights_raw)
    out += _i32_bytes(mech.intercepts_raw)
    out += struct.pack("<H", len(model.layers))
    for layer in model.layers:
        n = len(layer.nodes)
        fan_in = layer.fan_in
        out += struct.pack("<BII", int(layer.activation), n, fan_in)
        for node in layer.nodes:
            out += node.w.to_word_bytes()
        out += bytes(node.shift for node in layer.nodes)
        out += _i32_bytes(np.array([node.bias_raw for node in layer.nodes]))
        out += _i32_bytes(np.stack([node.beta_raw for node in layer.nodes]))
    if include_floats:
        out += _f64_bytes(mech.weights)
        out += _f64_bytes(mech.intercepts)
        for layer in model.layers:
            out += _f64_bytes(layer.biases())
            out += _f64_bytes(layer.betas())
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError("model file is truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def i32(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * count), dtype="<i4").copy()

    def f64(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").copy()


def model_from_bytes(data: bytes) -> ScmModel:
    if len(data) < 8 or data[:4] != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != VERSION:
        raise ModelFormatError(f"unsupported model file version {version}")
    (stored_crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != stored_crc:
        raise ModelFormatError("model file CRC mismatch")

    r = _Reader(data[:-4])
    r.take(4 + 2)  # magic + version
    (flags,) = r.unpack("<B")
    enc = EncodingSpec(EncodingKind(r.take(1)[0]), r.take(1)[0])
    m, d_enc = r.unpack("<HI")
    source_tag, alpha = r.unpack("<Bd")
    if source_tag not in _SOURCE_NAMES:
        raise ModelFormatError(f"unknown mechanism source tag {source_tag}")
    p_raw = r.i32(d_enc * m).reshape(d_enc, m)
    u_raw = r.i32(m)
    (n_layers,) = r.unpack("<H")
    raw_layers = []
    for _ in range(n_layers):
        act, n, fan_in = r.unpack("<BII")
        row_bytes = max(1, -(-fan_in // 64)) * 8
        weights = [BitVec.from_word_bytes(fan_in, r.take(row_bytes)) for _ in range(n)]
        shifts = list(r.take(n))
        if any(s > 7 for s in shifts):
            raise ModelFormatError("scale code above 7")
        biases_raw = r.i32(n)
        betas_raw = r.i32(n * m).reshape(n, m)
        raw_layers.append((Activation(act), weights, shifts, biases_raw, betas_raw))

    if flags & FLAG_FLOAT_SIDECAR:
        p = r.f64(d_enc * m).reshape(d_enc, m)
        u = r.f64(m)
        layer_floats = []
        for _, weights, *_ in raw_layers:
            n = len(weights)
            layer_floats.append((r.f64(n), r.f64(n * m).reshape(n, m)))
    else:
        p = fx.dequantize_array(p_raw)
        u = fx.dequantize_array(u_raw)
        layer_floats = [
            (fx.dequantize_array(b), fx.dequantize_array(bt).reshape(len(w), m))
            for _, w, _, b, bt in raw_layers
        ]
    if r.pos != len(r.data):
        raise ModelFormatError("trailing bytes after model body")

    mech = MechanismModel(
        weights=p,
        intercepts=u,
        weights_raw=p_raw,
        intercepts_raw=u_raw,
        source=_SOURCE_NAMES[source_tag],
        alpha=alpha,
    )
    layers = []
    for (act, weights, shifts, biases_raw, betas_raw), (biases, betas) in zip(
        raw_layers, layer_floats
    ):
        nodes = [
            ScmNode(
                w=weights[i],
                shift=shifts[i],
                bias=float(biases[i]),
                bias_raw=int(biases_raw[i]),
                beta=betas[i].copy(),
                beta_raw=betas_raw[i].copy(),
            )
            for i in range(len(weights))
        ]
        layers.append(ScmLayer(act, nodes))
    model = ScmModel(encoding=enc, mechanism=mech, layers=layers, n_outputs=m)
    try:
        model.validate()
    except ValueError as exc:
        raise ModelFormatError(f"inconsistent model file: {exc}") from exc
    return model


def save_model(model: ScmModel, path: str | Path, include_floats: bool = True) -> None:
    Path(path).write_bytes(model_to_bytes(model, include_floats))


def load_model(path: str | Path) -> ScmModel:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc}") from exc
    return model_from_bytes(data)


# -- JSON interchange -------------------------------------------------------


def model_to_json(model: ScmModel) -> str:
    """Readable lossless dump: raw integers plus the float sidecar values."""
    mech = model.mechanism
    doc = {
        "format": "scmfpga-model",
        "version": VERSION,
        "encoding": str(model.encoding),
        "n_outputs": model.n_outputs,
        "mechanism": {
            "source": mech.source,
            "alpha": mech.alpha,
            "d_enc": mech.d_enc,
            "weights_raw": mech.weights_raw.tolist(),
            "intercepts_raw": mech.intercepts_raw.tolist(),
            "weights": mech.weights.tolist(),
            "intercepts": mech.intercepts.tolist(),
        },
        "layers": [
            {
                "activation": layer.activation.name.lower(),
                "fan_in": layer.fan_in,
                "nodes": [
                    {
                        "weights": node.w.to_string(),
                        "shift": node.shift,
                        "bias_raw": node.bias_raw,
                        "bias": node.bias,
                        "beta_raw": node.beta_raw.tolist(),
                        "beta": node.beta.tolist(),
                    }
                    for node in layer.nodes
                ],
            }
            for layer in model.layers
        ],
    }
    return json.dumps(doc, indent=2)


def model_from_json(text: str) -> ScmModel:
    """Rebuild a model from its JSON form.

    Raw fields may be omitted (they are requantized from the floats), and
    float fields may be omitted (reconstructed from the raw values), which
    makes hand-written mechanism models practical.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"bad JSON: {exc}") from exc
    if doc.get("format") != "scmfpga-model":
        raise ModelFormatError("not a model JSON document")
    if doc.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')}")
    from .encoding import parse_encoding  # local import keeps module deps flat

    try:
        enc = parse_encoding(doc["encoding"])
        m = int(doc["n_outputs"])
        md = doc["mechanism"]
        d_enc = int(md["d_enc"])
        p, p_raw = _value_pair(md.get("weights"), md.get("weights_raw"), (d_enc, m))
        u, u_raw = _value_pair(md.get("intercepts"), md.get("intercepts_raw"), (m,))
        mech = MechanismModel(
            weights=p,
            intercepts=u,
            weights_raw=p_raw,
            intercepts_raw=u_raw,
            source=str(md.get("source", SOURCE_EXTERNAL)),
            alpha=float(md.get("alpha", 0.0)),
        )
        layers = []
        for ld in doc.get("layers", []):
            act = Activation[ld["activation"].upper()]
            nodes = []
            for nd in ld["nodes"]:
                beta, beta_raw = _value_pair(nd.get("beta"), nd.get("beta_raw"), (m,))
                if nd.get("bias") is not None:
                    bias = float(nd["bias"])
                    bias_raw = int(nd["bias_raw"]) if "bias_raw" in nd else fx.fx_from_real(bias)
                else:
                    bias_raw = int(nd["bias_raw"])
                    bias = fx.fx_to_real(bias_raw)
                nodes.append(
                    ScmNode(
                        w=BitVec.from_string(nd["weights"]),
                        shift=int(nd["shift"]),
                        bias=bias,
                        bias_raw=bias_raw,
                        beta=beta,
                        beta_raw=beta_raw,
                    )
                )
            layers.append(ScmLayer(act, nodes))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad model JSON: {exc}") from exc
    model = ScmModel(encoding=enc, mechanism=mech, layers=layers, n_outputs=m)
    try:
        model.validate()
    except ValueError as exc:
        raise ModelFormatError(f"inconsistent model JSON: {exc}") from exc
    return model


def _value_pair(floats, raws, shape) -> tuple[np.ndarray, np.ndarray]:
    if floats is None and raws is None:
        raise ValueError("need float or raw values")
    if floats is not None:
        f = np.asarray(floats, dtype=np.float64).reshape(shape)
        if raws is not None:
            r = np.asarray(raws, dtype=np.int32).reshape(shape)
        else:
            r, _ = fx.quantize_array(f)
    else:
        r = np.asarray(raws, dtype=np.int32).reshape(shape)
        f = fx.dequantize_array(r)
    return f, r
