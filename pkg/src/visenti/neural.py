"""Hand-built differentiable models in float64 numpy.

Two classifiers share one interface (forward, loss_and_gradients,
param_tensors):

* CombViSAModel: a bidirectional recurrent-convolutional encoder over the
  per-token contextual matrix (forward and backward LSTM states concatenated
  with the token vector, a width-1 convolution, tanh, max-over-time), a dense
  head on the pooled vector, an optional dense head on the sentiment-score
  vectors, and a fusion MLP ending in softmax.
* LstmClassifier: a plain forward LSTM whose last hidden state feeds a dense
  head; the no-sentiment baseline.

All gradients are exact analytic backprop, verifiable with the central
difference checker at the bottom of the module. Parameters initialize from a
caller-supplied generator (uniform in [-0.08, 0.08]) or to zeros when no
generator is given, and every tensor is addressable by a stable dotted name
so optimizers, checkpoints, and the gradient checker agree on ordering.
"""

from dataclasses import dataclass

import numpy as np

from .embeddings import EncoderOutput
from .errors import ConfigError, DataError, ParseError, ShapeError
from .ioutil import atomic_write, fmt

INIT_SCALE = 0.08
GATES = ("i", "f", "o", "g")
MODEL_KINDS = ("comb", "lstm")


@dataclass
class ModelConfig:
    enc_dim: int
    senti_len: int = 128
    hidden_dim: int = 32
    filters: int = 64
    d_lm: int = 64
    d_sw: int = 64
    fusion_hidden: tuple = (64,)
    head_hidden: tuple = ()
    class_count: int = 2
    use_sentivec: bool = True

    def __post_init__(self):
        self.fusion_hidden = tuple(int(d) for d in self.fusion_hidden)
        self.head_hidden = tuple(int(d) for d in self.head_hidden)
        for name in ("enc_dim", "senti_len", "hidden_dim", "filters", "d_lm", "d_sw"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.class_count not in (2, 3):
            raise ConfigError(f"class_count must be 2 or 3, got {self.class_count}")
        for dims in (self.fusion_hidden, self.head_hidden):
            if any(d < 1 for d in dims):
                raise ConfigError(f"hidden widths must be >= 1, got {dims}")


def _sigmoid(x):
    # tanh form avoids overflow for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _init(rng, *shape):
    if rng is None:
        return np.zeros(shape, dtype=np.float64)
    return rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape).astype(np.float64)


# ---------------------------------------------------------------------------
# LSTM


def lstm_init(rng, input_dim: int, hidden_dim: int) -> dict:
    params = {}
    for gate in GATES:
        params[f"W_{gate}"] = _init(rng, hidden_dim, input_dim)
        params[f"U_{gate}"] = _init(rng, hidden_dim, hidden_dim)
        params[f"b_{gate}"] = _init(rng, hidden_dim)
    return params


def lstm_cell(params: dict, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
    """One step: gated update of (h, c) from one input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params["W_i"].shape[1],):
        raise ShapeError(f"input shape {x.shape} does not match W ({params['W_i'].shape})")
    gi = _sigmoid(params["W_i"] @ x + params["U_i"] @ h_prev + params["b_i"])
    gf = _sigmoid(params["W_f"] @ x + params["U_f"] @ h_prev + params["b_f"])
    go = _sigmoid(params["W_o"] @ x + params["U_o"] @ h_prev + params["b_o"])
    gg = np.tanh(params["W_g"] @ x + params["U_g"] @ h_prev + params["b_g"])
    c = gi * gg + gf * c_prev
    h = go * np.tanh(c)
    return h, c


def lstm_forward(params: dict, xs: np.ndarray):
    """Run the cell over xs (T x D); returns hidden states (T x H) and caches."""
    steps = xs.shape[0]
    hidden_dim = params["b_i"].shape[0]
    pre = {g: xs @ params[f"W_{g}"].T + params[f"b_{g}"] for g in GATES}
    hs = np.zeros((steps, hidden_dim), dtype=np.float64)
    h = np.zeros(hidden_dim, dtype=np.float64)
    c = np.zeros(hidden_dim, dtype=np.float64)
    caches = []
    for t in range(steps):
        gi = _sigmoid(pre["i"][t] + params["U_i"] @ h)
        gf = _sigmoid(pre["f"][t] + params["U_f"] @ h)
        go = _sigmoid(pre["o"][t] + params["U_o"] @ h)
        gg = np.tanh(pre["g"][t] + params["U_g"] @ h)
        c_prev = c
        c = gi * gg + gf * c_prev
        tanh_c = np.tanh(c)
        caches.append((gi, gf, go, gg, c_prev, tanh_c))
        h = go * tanh_c
        hs[t] = h
    return hs, caches


def lstm_backward(params: dict, xs: np.ndarray, hs: np.ndarray, caches, dhs: np.ndarray):
    """Backprop through time; returns (grads keyed like params, dxs)."""
    steps, hidden_dim = hs.shape
    das = {g: np.zeros((steps, hidden_dim), dtype=np.float64) for g in GATES}
    dh_carry = np.zeros(hidden_dim, dtype=np.float64)
    dc_carry = np.zeros(hidden_dim, dtype=np.float64)
    for t in range(steps - 1, -1, -1):
        gi, gf, go, gg, c_prev, tanh_c = caches[t]
        dh = dhs[t] + dh_carry
        do = dh * tanh_c
        dc = dc_carry + dh * go * (1.0 - tanh_c**2)
        di = dc * gg
        dg = dc * gi
        df = dc * c_prev
        dc_carry = dc * gf
        das["i"][t] = di * gi * (1.0 - gi)
        das["f"][t] = df * gf * (1.0 - gf)
        das["o"][t] = do * go * (1.0 - go)
        das["g"][t] = dg * (1.0 - gg**2)
        dh_carry = sum(params[f"U_{g}"].T @ das[g][t] for g in GATES)
    h_prev = np.zeros_like(hs)
    h_prev[1:] = hs[:-1]
    grads = {}
    dxs = np.zeros_like(xs)
    for g in GATES:
        grads[f"W_{g}"] = das[g].T @ xs
        grads[f"U_{g}"] = das[g].T @ h_prev
        grads[f"b_{g}"] = das[g].sum(axis=0)
        dxs += das[g] @ params[f"W_{g}"]
    return grads, dxs


# ---------------------------------------------------------------------------
# Dense stack: affine + tanh pairs, final affine bare


class Mlp:
    def __init__(self, rng, in_dim: int, hidden, out_dim: int):
        dims = [in_dim, *hidden, out_dim]
        self.layer_count = len(dims) - 1
        self.params = {}
        for k in range(self.layer_count):
            self.params[f"L{k}.W"] = _init(rng, dims[k + 1], dims[k])
            self.params[f"L{k}.b"] = _init(rng, dims[k + 1])

    def forward(self, x: np.ndarray):
        activations = [x]
        for k in range(self.layer_count):
            a = self.params[f"L{k}.W"] @ activations[-1] + self.params[f"L{k}.b"]
            activations.append(np.tanh(a) if k < self.layer_count - 1 else a)
        return activations[-1], activations

    def backward(self, activations, dout: np.ndarray):
        grads = {}
        d = dout
        for k in range(self.layer_count - 1, -1, -1):
            out_k = activations[k + 1]
            if k < self.layer_count - 1:
                d = d * (1.0 - out_k**2)
            grads[f"L{k}.W"] = np.outer(d, activations[k])
            grads[f"L{k}.b"] = d
            d = self.params[f"L{k}.W"].T @ d
        return grads, d


# ---------------------------------------------------------------------------
# Losses


def softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    if logits.size == 0:
        raise ShapeError("softmax of an empty vector")
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def cross_entropy(logits: np.ndarray, label: int):
    """Stable loss plus dloss/dlogits."""
    shifted = logits - logits.max()
    log_z = np.log(np.exp(shifted).sum())
    log_probs = shifted - log_z
    probs = np.exp(log_probs)
    dlogits = probs.copy()
    dlogits[label] -= 1.0
    return -log_probs[label], probs, dlogits


def _check_label(label, class_count):
    if not isinstance(label, (int, np.integer)) or not 0 <= label < class_count:
        raise DataError(f"label must be an integer in [0, {class_count}), got {label!r}")


# ---------------------------------------------------------------------------
# Recurrent-convolutional encoder + fusion model


class CombViSAModel:
    kind = "comb"

    def __init__(self, config: ModelConfig, rng=None):
        self.config = config
        h, d = config.hidden_dim, config.enc_dim
        self.fwd = lstm_init(rng, d, h)
        self.bwd = lstm_init(rng, d, h)
        self.conv_w = _init(rng, config.filters, 2 * h + d)
        self.conv_b = _init(rng, config.filters)
        self.lm_head = Mlp(rng, config.filters, config.head_hidden, config.d_lm)
        if config.use_sentivec:
            self.sw_head = Mlp(rng, 2 * config.senti_len, config.head_hidden, config.d_sw)
            fusion_in = config.d_lm + config.d_sw
        else:
            self.sw_head = None
            fusion_in = config.d_lm
        self.fusion = Mlp(rng, fusion_in, config.fusion_hidden, config.class_count)

    def param_tensors(self) -> dict:
        tensors = {}
        for prefix, block in (("rcnn.fwd", self.fwd), ("rcnn.bwd", self.bwd)):
            for name, arr in block.items():
                tensors[f"{prefix}.{name}"] = arr
        tensors["rcnn.conv.W"] = self.conv_w
        tensors["rcnn.conv.b"] = self.conv_b
        for name, arr in self.lm_head.params.items():
            tensors[f"lm_head.{name}"] = arr
        if self.sw_head is not None:
            for name, arr in self.sw_head.params.items():
                tensors[f"sw_head.{name}"] = arr
        for name, arr in self.fusion.params.items():
            tensors[f"fusion.{name}"] = arr
        return tensors

    def _check_inputs(self, enc: EncoderOutput, sv):
        if enc.sl < 1:
            raise ShapeError("encoder output has no rows")
        if enc.h != self.config.enc_dim:
            raise ShapeError(f"encoder width {enc.h} != configured {self.config.enc_dim}")
        if self.sw_head is not None:
            if sv is None:
                raise DataError("model uses sentiment vectors but none were given")
            if sv.length != self.config.senti_len:
                raise ShapeError(
                    f"sentiment vector length {sv.length} != configured {self.config.senti_len}"
                )

    def _rcnn(self, xs: np.ndarray):
        cl, fwd_caches = lstm_forward(self.fwd, xs)
        cr_rev, bwd_caches = lstm_forward(self.bwd, xs[::-1])
        cr = cr_rev[::-1]
        z = np.concatenate([cl, xs, cr], axis=1)
        conv = np.tanh(z @ self.conv_w.T + self.conv_b)
        arg = conv.argmax(axis=0)
        pooled = conv[arg, np.arange(conv.shape[1])]
        return pooled, cl, cr, fwd_caches, bwd_caches, z, conv, arg

    def rcnn_forward(self, enc: EncoderOutput) -> np.ndarray:
        """Pooled feature vector of the recurrent-convolutional encoder alone."""
        if enc.sl < 1:
            raise ShapeError("encoder output has no rows")
        if enc.h != self.config.enc_dim:
            raise ShapeError(f"encoder width {enc.h} != configured {self.config.enc_dim}")
        return self._rcnn(enc.matrix)[0]

    def _forward_full(self, enc: EncoderOutput, sv):
        self._check_inputs(enc, sv)
        xs = enc.matrix
        pooled, cl, cr, fwd_caches, bwd_caches, z, conv, arg = self._rcnn(xs)
        lm_vec, lm_acts = self.lm_head.forward(pooled)
        if self.sw_head is not None:
            sw_in = np.concatenate([sv.pos, sv.neg])
            sw_vec, sw_acts = self.sw_head.forward(sw_in)
            fused_in = np.concatenate([lm_vec, sw_vec])
        else:
            sw_acts = None
            fused_in = lm_vec
        logits, fusion_acts = self.fusion.forward(fused_in)
        return {
            "xs": xs,
            "cl": cl,
            "cr": cr,
            "fwd_caches": fwd_caches,
            "bwd_caches": bwd_caches,
            "z": z,
            "conv": conv,
            "arg": arg,
            "lm_acts": lm_acts,
            "sw_acts": sw_acts,
            "fusion_acts": fusion_acts,
            "logits": logits,
        }

    def forward(self, enc: EncoderOutput, sv=None) -> np.ndarray:
        return softmax(self._forward_full(enc, sv)["logits"])

    def loss_and_gradients(self, enc: EncoderOutput, sv, label: int):
        _check_label(label, self.config.class_count)
        state = self._forward_full(enc, sv)
        loss, probs, dlogits = cross_entropy(state["logits"], int(label))
        grads = {}
        fusion_grads, dfused = self.fusion.backward(state["fusion_acts"], dlogits)
        for name, g in fusion_grads.items():
            grads[f"fusion.{name}"] = g
        if self.sw_head is not None:
            dlm = dfused[: self.config.d_lm]
            dsw = dfused[self.config.d_lm :]
            sw_grads, _ = self.sw_head.backward(state["sw_acts"], dsw)
            for name, g in sw_grads.items():
                grads[f"sw_head.{name}"] = g
        else:
            dlm = dfused
        lm_grads, dpooled = self.lm_head.backward(state["lm_acts"], dlm)
        for name, g in lm_grads.items():
            grads[f"lm_head.{name}"] = g
        # max pooling routes each filter's gradient to its argmax row
        conv, arg = state["conv"], state["arg"]
        dconv = np.zeros_like(conv)
        cols = np.arange(conv.shape[1])
        dconv[arg, cols] = dpooled
        dpre = dconv * (1.0 - conv**2)
        grads["rcnn.conv.W"] = dpre.T @ state["z"]
        grads["rcnn.conv.b"] = dpre.sum(axis=0)
        dz = dpre @ self.conv_w
        h = self.config.hidden_dim
        dcl = dz[:, :h]
        dcr = dz[:, h + self.config.enc_dim :]
        fwd_grads, _ = lstm_backward(self.fwd, state["xs"], state["cl"], state["fwd_caches"], dcl)
        bwd_grads, _ = lstm_backward(
            self.bwd, state["xs"][::-1], state["cr"][::-1], state["bwd_caches"], dcr[::-1]
        )
        for name, g in fwd_grads.items():
            grads[f"rcnn.fwd.{name}"] = g
        for name, g in bwd_grads.items():
            grads[f"rcnn.bwd.{name}"] = g
        return loss, probs, grads


class LstmClassifier:
    kind = "lstm"

    def __init__(self, config: ModelConfig, rng=None):
        self.config = config
        self.lstm = lstm_init(rng, config.enc_dim, config.hidden_dim)
        self.head = Mlp(rng, config.hidden_dim, config.head_hidden, config.class_count)

    def param_tensors(self) -> dict:
        tensors = {f"lstm.{name}": arr for name, arr in self.lstm.items()}
        for name, arr in self.head.params.items():
            tensors[f"head.{name}"] = arr
        return tensors

    def _forward_full(self, enc: EncoderOutput):
        if enc.sl < 1:
            raise ShapeError("encoder output has no rows")
        if enc.h != self.config.enc_dim:
            raise ShapeError(f"encoder width {enc.h} != configured {self.config.enc_dim}")
        hs, caches = lstm_forward(self.lstm, enc.matrix)
        logits, acts = self.head.forward(hs[-1])
        return {"xs": enc.matrix, "hs": hs, "caches": caches, "acts": acts, "logits": logits}

    def forward(self, enc: EncoderOutput, sv=None) -> np.ndarray:
        return softmax(self._forward_full(enc)["logits"])

    def loss_and_gradients(self, enc: EncoderOutput, sv, label: int):
        _check_label(label, self.config.class_count)
        state = self._forward_full(enc)
        loss, probs, dlogits = cross_entropy(state["logits"], int(label))
        grads = {}
        head_grads, dlast = self.head.backward(state["acts"], dlogits)
        for name, g in head_grads.items():
            grads[f"head.{name}"] = g
        dhs = np.zeros_like(state["hs"])
        dhs[-1] = dlast
        lstm_grads, _ = lstm_backward(self.lstm, state["xs"], state["hs"], state["caches"], dhs)
        for name, g in lstm_grads.items():
            grads[f"lstm.{name}"] = g
        return loss, probs, grads


def build_model(config: ModelConfig, kind: str = "comb", rng=None):
    if kind == "comb":
        return CombViSAModel(config, rng=rng)
    if kind == "lstm":
        return LstmClassifier(config, rng=rng)
    raise ConfigError(f"model kind must be one of {MODEL_KINDS}, got {kind!r}")


# ---------------------------------------------------------------------------
# Checkpoints: plain text, byte-stable across runs with equal seeds

CHECKPOINT_MAGIC = "visenti-checkpoint v1"
_CONFIG_FIELDS = (
    "enc_dim",
    "senti_len",
    "hidden_dim",
    "filters",
    "d_lm",
    "d_sw",
    "fusion_hidden",
    "head_hidden",
    "class_count",
    "use_sentivec",
)


def _encode_meta(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value) if value else "-"
    return str(value)


def _decode_tuple(text):
    return () if text == "-" else tuple(int(v) for v in text.split(","))


def save_checkpoint(model, path) -> None:
    with atomic_write(path) as handle:
        handle.write(CHECKPOINT_MAGIC + "\n")
        handle.write(f"kind {model.kind}\n")
        for field_name in _CONFIG_FIELDS:
            handle.write(f"{field_name} {_encode_meta(getattr(model.config, field_name))}\n")
        tensors = model.param_tensors()
        handle.write(f"params {len(tensors)}\n")
        for name, arr in tensors.items():
            dims = " ".join(str(d) for d in arr.shape)
            handle.write(f"tensor {name} {dims}\n")
            rows = arr.reshape(1, -1) if arr.ndim == 1 else arr
            for row in rows:
                handle.write(" ".join(fmt(v) for v in row) + "\n")


def load_checkpoint(path):
    with open(path, encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle]
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise ParseError(path, 1, "not a checkpoint file")
    meta = {}
    cursor = 1
    while cursor < len(lines) and not lines[cursor].startswith("tensor "):
        if lines[cursor].strip():
            key, _, value = lines[cursor].partition(" ")
            meta[key] = value
        cursor += 1
    try:
        config = ModelConfig(
            enc_dim=int(meta["enc_dim"]),
            senti_len=int(meta["senti_len"]),
            hidden_dim=int(meta["hidden_dim"]),
            filters=int(meta["filters"]),
            d_lm=int(meta["d_lm"]),
            d_sw=int(meta["d_sw"]),
            fusion_hidden=_decode_tuple(meta["fusion_hidden"]),
            head_hidden=_decode_tuple(meta["head_hidden"]),
            class_count=int(meta["class_count"]),
            use_sentivec=meta["use_sentivec"] == "1",
        )
        kind = meta["kind"]
    except (KeyError, ValueError) as exc:
        raise ParseError(path, None, f"bad checkpoint header: {exc}") from None
    model = build_model(config, kind=kind)
    tensors = model.param_tensors()
    seen = set()
    while cursor < len(lines):
        if not lines[cursor].strip():
            cursor += 1
            continue
        fields = lines[cursor].split()
        if fields[0] != "tensor":
            raise ParseError(path, cursor + 1, f"expected tensor header, got {lines[cursor]!r}")
        name, dims = fields[1], tuple(int(d) for d in fields[2:])
        if name not in tensors:
            raise ParseError(path, cursor + 1, f"unknown tensor {name!r}")
        arr = tensors[name]
        if dims != arr.shape:
            raise ParseError(path, cursor + 1, f"tensor {name} has shape {dims}, expected {arr.shape}")
        row_count = 1 if arr.ndim == 1 else arr.shape[0]
        width = arr.shape[-1]
        cursor += 1
        values = []
        for _ in range(row_count):
            if cursor >= len(lines):
                raise ParseError(path, None, f"truncated tensor {name}")
            row = lines[cursor].split()
            if len(row) != width:
                raise ParseError(path, cursor + 1, f"expected {width} values, got {len(row)}")
            values.append([float(v) for v in row])
            cursor += 1
        arr[...] = np.array(values, dtype=np.float64).reshape(arr.shape)
        seen.add(name)
    missing = set(tensors) - seen
    if missing:
        raise ParseError(path, None, f"checkpoint missing tensors: {sorted(missing)}")
    return model


# ---------------------------------------------------------------------------
# Gradient verification


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_name: str
    worst_index: int
    analytic: float
    numeric: float
    checked: int


def grad_check(
    model,
    sample,
    epsilon: float = 1e-5,
    budget=None,
    rng=None,
    analytic=None,
) -> GradCheckReport:
    """Central-difference check of every (or a sampled subset of) coordinate.

    `sample` is an (encoder output, sentiment vectors or None, label) triple.
    `analytic` overrides the model's own gradients, which lets callers verify
    that a corrupted gradient is actually flagged.
    """
    if epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    enc, sv, label = sample
    _, _, grads = model.loss_and_gradients(enc, sv, label)
    if analytic is not None:
        grads = analytic
    tensors = model.param_tensors()
    coords = [(name, idx) for name, arr in tensors.items() for idx in range(arr.size)]
    if budget is not None and budget < len(coords):
        picker = rng if rng is not None else np.random.default_rng(0)
        chosen = picker.choice(len(coords), size=budget, replace=False)
        coords = [coords[int(k)] for k in sorted(chosen)]
    worst = (-1.0, "", 0, 0.0, 0.0)
    for name, idx in coords:
        arr = tensors[name]
        original = arr.flat[idx]
        arr.flat[idx] = original + epsilon
        loss_plus, _, _ = model.loss_and_gradients(enc, sv, label)
        arr.flat[idx] = original - epsilon
        loss_minus, _, _ = model.loss_and_gradients(enc, sv, label)
        arr.flat[idx] = original
        numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
        analytic_value = float(grads[name].flat[idx])
        rel = abs(analytic_value - numeric) / max(abs(analytic_value), abs(numeric), 1e-8)
        if rel > worst[0]:
            worst = (rel, name, idx, analytic_value, numeric)
    return GradCheckReport(
        max_rel_error=worst[0],
        worst_name=worst[1],
        worst_index=worst[2],
        analytic=worst[3],
        numeric=worst[4],
        checked=len(coords),
    )
