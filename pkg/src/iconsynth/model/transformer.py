"""Decoder-only causal transformer over the joint text+SVG vocabulary.

SVG location tokens get coordinate-augmented embeddings: the packed
location id contributes its token-table row plus one row from each of
the x- and y-coordinate tables. Non-location tokens contribute zero
coordinate terms (or a learned null column when configured). A learned
absolute positional table covers the fixed 562-slot layout.

forward/backward implement training with explicit reverse-mode
differentiation; DecodeSession provides cached incremental decoding.
"""

from __future__ import annotations

import numpy as np

from .. import tokenizer
from ..joint_vocab import JointVocab
from .config import ModelConfig
from . import nn

NEG_INF = -1e30  # large-negative mask value keeps softmax finite in any dtype


class Transformer:
    def __init__(self, cfg: ModelConfig, params: dict):
        self.cfg = cfg
        self.params = params
        self.joint = JointVocab(cfg.text_vocab_size)

    # --- embedding ---

    def _split_ids(self, flat: np.ndarray):
        jv = self.joint
        text_m = flat < jv.svg_base
        svg_m = (flat >= jv.svg_base) & (flat < jv.sos_id)
        spec_m = flat >= jv.sos_id
        return text_m, svg_m, spec_m

    def embed_ids(self, ids: np.ndarray, positions: np.ndarray):
        """(N,) joint ids + positions -> (N, D) embeddings, cache for backward."""
        p = self.params
        flat = np.asarray(ids, dtype=np.int64)
        text_m, svg_m, spec_m = self._split_ids(flat)
        out = np.zeros((flat.shape[0], self.cfg.dim), dtype=self.cfg.np_dtype)
        out[text_m] = p["text_emb"][flat[text_m]]
        svg_local = flat[svg_m] - self.joint.svg_base
        svg_rows = p["svg_emb"][svg_local]
        loc_m = (svg_local >= tokenizer.LOC_BASE) & (svg_local < tokenizer.BOP)
        v = svg_local[loc_m] - tokenizer.LOC_BASE
        xi, yi = v // tokenizer.GRID, v % tokenizer.GRID
        coords = np.zeros_like(svg_rows)
        coords[loc_m] = p["x_emb"][xi] + p["y_emb"][yi]
        if self.cfg.coord_null_columns:
            coords[~loc_m] = p["x_emb"][tokenizer.GRID] + p["y_emb"][tokenizer.GRID]
        out[svg_m] = svg_rows + coords
        out[spec_m] = p["special_emb"][flat[spec_m] - self.joint.sos_id]
        out = out + p["pos_emb"][positions]
        cache = (flat, positions, text_m, svg_m, spec_m, svg_local, loc_m, xi, yi)
        return out, cache

    def _embed_backward(self, dout: np.ndarray, cache, grads: dict, tiled_bt=None):
        flat, positions, text_m, svg_m, spec_m, svg_local, loc_m, xi, yi = cache
        if tiled_bt is not None:
            # training layout: positions are arange(T) tiled B times
            B, T = tiled_bt
            grads["pos_emb"][:T] += dout.reshape(B, T, -1).sum(axis=0)
        else:
            np.add.at(grads["pos_emb"], positions, dout)
        np.add.at(grads["text_emb"], flat[text_m], dout[text_m])
        dsvg = dout[svg_m]
        np.add.at(grads["svg_emb"], svg_local, dsvg)
        dloc = dsvg[loc_m]
        np.add.at(grads["x_emb"], xi, dloc)
        np.add.at(grads["y_emb"], yi, dloc)
        if self.cfg.coord_null_columns:
            dnull = dsvg[~loc_m].sum(axis=0)
            grads["x_emb"][tokenizer.GRID] += dnull
            grads["y_emb"][tokenizer.GRID] += dnull
        np.add.at(grads["special_emb"], flat[spec_m] - self.joint.sos_id, dout[spec_m])

    # --- training forward / backward ---

    def forward(
        self,
        ids: np.ndarray,
        train: bool = False,
        rng: np.random.Generator | None = None,
        loss_mask: np.ndarray | None = None,
    ):
        """ids (B, T) -> logits and a backward cache.

        With loss_mask (B, T) the output head runs only at the masked-in
        positions and logits have shape (NW, V); otherwise (B, T, V).
        """
        cfg, p = self.cfg, self.params
        B, T = ids.shape
        if T > cfg.max_len:
            raise ValueError(f"sequence length {T} exceeds max_len {cfg.max_len}")
        if train and cfg.dropout > 0.0 and rng is None:
            raise ValueError("train-mode forward with dropout needs an rng")
        positions = np.arange(T)
        emb, emb_cache = self.embed_ids(ids.reshape(-1), np.tile(positions, B))
        x = emb.reshape(B, T, cfg.dim)
        causal = np.triu(np.ones((T, T), dtype=bool), k=1)
        blocks = []
        for i in range(cfg.layers):
            x, cache = self._block_forward(x, i, causal, train, rng)
            blocks.append(cache)
        hN, lnf_cache = nn.layernorm_forward(x, p["ln_f_g"], p["ln_f_b"])
        if loss_mask is not None:
            rows = hN[loss_mask]
            logits, head_cache = nn.linear_forward(rows, p["head_w"], p["head_b"])
        else:
            logits, head_cache = nn.linear_forward(hN, p["head_w"], p["head_b"])
        cache = {
            "B": B,
            "T": T,
            "emb_cache": emb_cache,
            "blocks": blocks,
            "lnf_cache": lnf_cache,
            "head_cache": head_cache,
            "loss_mask": loss_mask,
        }
        return logits, cache

    def backward(self, dlogits: np.ndarray, cache) -> dict:
        cfg, p = self.cfg, self.params
        B, T = cache["B"], cache["T"]
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        drows, dhw, dhb = nn.linear_backward(dlogits, cache["head_cache"])
        grads["head_w"] += dhw
        grads["head_b"] += dhb
        if cache["loss_mask"] is not None:
            dhN = np.zeros((B, T, cfg.dim), dtype=cfg.np_dtype)
            dhN[cache["loss_mask"]] = drows
        else:
            dhN = drows
        dx, dg, db = nn.layernorm_backward(dhN, cache["lnf_cache"])
        grads["ln_f_g"] += dg
        grads["ln_f_b"] += db
        for i in reversed(range(cfg.layers)):
            dx = self._block_backward(dx, i, cache["blocks"][i], grads)
        self._embed_backward(
            dx.reshape(B * T, cfg.dim), cache["emb_cache"], grads, tiled_bt=(B, T)
        )
        return grads

    def _block_forward(self, x, i, causal, train, rng):
        cfg, p = self.cfg, self.params
        B, T, D = x.shape
        H, dh = cfg.heads, cfg.dim // cfg.heads
        pre = f"layer{i}."
        a, ln1c = nn.layernorm_forward(x, p[pre + "ln1_g"], p[pre + "ln1_b"])
        q, qc = nn.linear_forward(a, p[pre + "wq"], p[pre + "bq"])
        k, kc = nn.linear_forward(a, p[pre + "wk"], p[pre + "bk"])
        v, vc = nn.linear_forward(a, p[pre + "wv"], p[pre + "bv"])
        qh = q.reshape(B, T, H, dh).transpose(0, 2, 1, 3)
        kh = k.reshape(B, T, H, dh).transpose(0, 2, 1, 3)
        vh = v.reshape(B, T, H, dh).transpose(0, 2, 1, 3)
        scale = 1.0 / np.sqrt(dh)
        scores = qh @ kh.transpose(0, 1, 3, 2)
        scores *= scale
        np.copyto(scores, NEG_INF, where=causal[None, None])
        prob = nn.softmax(scores)
        prob_d, pmask = nn.dropout_forward(prob, cfg.dropout, rng, train)
        ctx = (prob_d @ vh).transpose(0, 2, 1, 3).reshape(B, T, D)
        attn, oc = nn.linear_forward(ctx, p[pre + "wo"], p[pre + "bo"])
        attn_d, omask = nn.dropout_forward(attn, cfg.dropout, rng, train)
        x1 = x + attn_d
        f, ln2c = nn.layernorm_forward(x1, p[pre + "ln2_g"], p[pre + "ln2_b"])
        h1, h1c = nn.linear_forward(f, p[pre + "w1"], p[pre + "b1"])
        act, gc = nn.gelu_forward(h1)
        h2, h2c = nn.linear_forward(act, p[pre + "w2"], p[pre + "b2"])
        h2_d, fmask = nn.dropout_forward(h2, cfg.dropout, rng, train)
        x2 = x1 + h2_d
        cache = (ln1c, qc, kc, vc, qh, kh, vh, prob, prob_d, pmask, oc, omask,
                 ln2c, h1c, gc, h2c, fmask, scale)
        return x2, cache

    def _block_backward(self, dx2, i, cache, grads):
        cfg, p = self.cfg, self.params
        (ln1c, qc, kc, vc, qh, kh, vh, prob, prob_d, pmask, oc, omask,
         ln2c, h1c, gc, h2c, fmask, scale) = cache
        pre = f"layer{i}."
        B, H, T, dh = qh.shape
        D = H * dh
        # ffn branch
        dh2 = nn.dropout_backward(dx2, fmask)
        dact, dw2, db2 = nn.linear_backward(dh2, h2c)
        grads[pre + "w2"] += dw2
        grads[pre + "b2"] += db2
        dh1 = nn.gelu_backward(dact, gc)
        df, dw1, db1 = nn.linear_backward(dh1, h1c)
        grads[pre + "w1"] += dw1
        grads[pre + "b1"] += db1
        dx1, dg2, db2n = nn.layernorm_backward(df, ln2c)
        grads[pre + "ln2_g"] += dg2
        grads[pre + "ln2_b"] += db2n
        dx1 = dx1 + dx2  # residual around the ffn
        # attention branch
        dattn = nn.dropout_backward(dx1, omask)
        dctx, dwo, dbo = nn.linear_backward(dattn, oc)
        grads[pre + "wo"] += dwo
        grads[pre + "bo"] += dbo
        dctx = dctx.reshape(B, T, H, dh).transpose(0, 2, 1, 3)
        dprob_d = dctx @ vh.transpose(0, 1, 3, 2)
        dvh = prob_d.transpose(0, 1, 3, 2) @ dctx
        dprob = nn.dropout_backward(dprob_d, pmask)
        dscores = nn.softmax_backward(dprob, prob) * scale
        dqh = dscores @ kh
        dkh = dscores.transpose(0, 1, 3, 2) @ qh
        dq = dqh.transpose(0, 2, 1, 3).reshape(B, T, D)
        dk = dkh.transpose(0, 2, 1, 3).reshape(B, T, D)
        dv = dvh.transpose(0, 2, 1, 3).reshape(B, T, D)
        da = np.zeros_like(dq)
        for dy, lc, wn, bn in ((dq, qc, "wq", "bq"), (dk, kc, "wk", "bk"), (dv, vc, "wv", "bv")):
            dpart, dw, db = nn.linear_backward(dy, lc)
            grads[pre + wn] += dw
            grads[pre + bn] += db
            da += dpart
        dxa, dg1, db1n = nn.layernorm_backward(da, ln1c)
        grads[pre + "ln1_g"] += dg1
        grads[pre + "ln1_b"] += db1n
        return dx1 + dxa  # residual around attention

    # --- evaluation helpers ---

    def eval_logits(self, ids: np.ndarray) -> np.ndarray:
        """Deterministic full logits, (B, T, V)."""
        logits, _ = self.forward(np.asarray(ids), train=False)
        return logits


class DecodeSession:
    """Incremental decoding with per-layer K/V caches (single sequence)."""

    def __init__(self, transformer: Transformer):
        self.tr = transformer
        cfg = transformer.cfg
        H, dh = cfg.heads, cfg.dim // cfg.heads
        self.kv = [
            (
                np.zeros((cfg.max_len, H, dh), dtype=cfg.np_dtype),
                np.zeros((cfg.max_len, H, dh), dtype=cfg.np_dtype),
            )
            for _ in range(cfg.layers)
        ]
        self.t = 0

    @property
    def position(self) -> int:
        return self.t

    def prime(self, ids) -> np.ndarray:
        embs, _ = self.tr.embed_ids(
            np.asarray(ids, dtype=np.int64), np.arange(self.t, self.t + len(ids))
        )
        return self.prime_embedded(embs)

    def prime_embedded(self, embs: np.ndarray) -> np.ndarray:
        """Feed a block of embedded positions; returns last-position logits."""
        cfg, p = self.tr.cfg, self.tr.params
        T = embs.shape[0]
        if self.t + T > cfg.max_len:
            raise ValueError("decode session exceeded the positional table")
        H, dh = cfg.heads, cfg.dim // cfg.heads
        x = embs
        t0 = self.t
        scale = 1.0 / np.sqrt(dh)
        causal = np.triu(np.ones((T, t0 + T), dtype=bool), k=t0 + 1)
        for i in range(cfg.layers):
            pre = f"layer{i}."
            a, _ = nn.layernorm_forward(x, p[pre + "ln1_g"], p[pre + "ln1_b"])
            q = a @ p[pre + "wq"] + p[pre + "bq"]
            k = a @ p[pre + "wk"] + p[pre + "bk"]
            v = a @ p[pre + "wv"] + p[pre + "bv"]
            K, V = self.kv[i]
            K[t0 : t0 + T] = k.reshape(T, H, dh)
            V[t0 : t0 + T] = v.reshape(T, H, dh)
            qh = q.reshape(T, H, dh)
            kh = K[: t0 + T]
            vh = V[: t0 + T]
            scores = np.einsum("thd,shd->hts", qh, kh) * scale
            scores = np.where(causal[None], NEG_INF, scores)
            prob = nn.softmax(scores)
            ctx = np.einsum("hts,shd->thd", prob, vh).reshape(T, cfg.dim)
            x = x + (ctx @ p[pre + "wo"] + p[pre + "bo"])
            f, _ = nn.layernorm_forward(x, p[pre + "ln2_g"], p[pre + "ln2_b"])
            act, _ = nn.gelu_forward(f @ p[pre + "w1"] + p[pre + "b1"])
            x = x + (act @ p[pre + "w2"] + p[pre + "b2"])
        self.t = t0 + T
        hN, _ = nn.layernorm_forward(x[-1], p["ln_f_g"], p["ln_f_b"])
        return hN @ p["head_w"] + p["head_b"]

    def step(self, joint_id: int) -> np.ndarray:
        """Feed one token; returns next-token logits."""
        embs, _ = self.tr.embed_ids(
            np.asarray([joint_id], dtype=np.int64), np.asarray([self.t])
        )
        return self.prime_embedded(embs)
