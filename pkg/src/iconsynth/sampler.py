"""Generation: unconditional/conditional sampling, fill-in-the-middle,
next-path suggestion, and text-embedding interpolation.

Randomness is position-keyed: the uniform deviate used at icon slot k
derives from (seed, k), so a fixed seed gives identical results whether
an icon is produced in one generate() call or resumed path-by-path via
suggest_next_path(). Passing a Generator instead of a seed draws a
fresh seed from it.

Grammar-constrained decoding masks logits to tokens legal under the
icon encoding grammar and reserves budget for a legal termination, so
every sample decodes strictly, even from an untrained checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import masking, text_frontend, tokenizer
from .geometry import Icon, SvgPath
from .model import IconModel

GREEDY = "greedy"
TEMPERATURE = "temperature"
TOP_K = "top_k"
NUCLEUS = "nucleus"


class GenerationError(RuntimeError):
    pass


class BudgetError(GenerationError):
    """The prompt leaves no room to sample anything."""


@dataclass(frozen=True)
class DecodeStrategy:
    kind: str = NUCLEUS
    temperature: float = 1.0
    k: int = 40
    p: float = 0.9
    grammar_constrained: bool = True
    max_icon_tokens: int = 512
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in (GREEDY, TEMPERATURE, TOP_K, NUCLEUS):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.kind == TOP_K and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.kind == NUCLEUS and not 0 < self.p <= 1:
            raise ValueError("p must be in (0, 1]")
        if not 1 <= self.max_icon_tokens <= 512:
            raise ValueError("max_icon_tokens must be in [1, 512]")


GREEDY_STRATEGY = DecodeStrategy(kind=GREEDY)

# --- icon grammar automaton (svg-local token ids) ---

_START = "start"
_SPAN_START = "span_start"  # span filling: whole paths only (or end at once)
_PATH_OPEN = "path_open"  # just after BOP: MoveTo required
_BOUNDARY = "boundary"  # between commands: cmd / BOP / end

_LOC_IDS = np.arange(tokenizer.LOC_BASE, tokenizer.BOP, dtype=np.int64)
_RAW_EOS_IDS = np.asarray(  # unconstrained whole-icon mode: no MASK/EOM
    [t for t in range(tokenizer.VOCAB_SIZE) if t not in (tokenizer.MASK, tokenizer.EOM)],
    dtype=np.int64,
)
_RAW_EOM_IDS = np.asarray(  # unconstrained span mode: no MASK/EOS
    [t for t in range(tokenizer.VOCAB_SIZE) if t not in (tokenizer.MASK, tokenizer.EOS)],
    dtype=np.int64,
)


class IconGrammar:
    """Tracks the encode grammar and yields the legal next-token set.

    end_token is EOS for whole-icon generation or EOM for span filling.
    legal_ids(budget) only admits tokens from which a legal termination
    still fits within the remaining quota, so constrained sampling can
    always terminate in time. Within a command, the pending location
    arguments were already budgeted for when the command was admitted.
    """

    def __init__(self, end_token: int = tokenizer.EOS, start_state: str = _START):
        self.end_token = end_token
        self.state = start_state
        self.pending_locs = 0

    def legal_ids(self, budget: int) -> np.ndarray:
        if self.pending_locs:
            return _LOC_IDS
        out = []
        if self.state == _PATH_OPEN:
            if budget >= 3:  # M + Loc + terminator
                out.append(tokenizer.CMD_M)
        else:
            if budget >= 4:  # BOP + M + Loc + terminator
                out.append(tokenizer.BOP)
            if self.state == _BOUNDARY:
                if budget >= 3:
                    out.append(tokenizer.CMD_M)
                    out.append(tokenizer.CMD_L)
                if budget >= 5:  # C + 3 Loc + terminator
                    out.append(tokenizer.CMD_C)
            if self.state in (_BOUNDARY, _SPAN_START):
                out.append(self.end_token)
        return np.asarray(out, dtype=np.int64)

    def feed(self, tok: int) -> None:
        if self.pending_locs:
            if not tokenizer.is_loc(tok):
                raise GenerationError(f"grammar violated: expected location, got {tok}")
            self.pending_locs -= 1
            if self.pending_locs == 0:
                self.state = _BOUNDARY
            return
        if tok == tokenizer.BOP and self.state != _PATH_OPEN:
            self.state = _PATH_OPEN
        elif tok == tokenizer.CMD_M and self.state in (_PATH_OPEN, _BOUNDARY):
            self.pending_locs = 1
        elif tok in (tokenizer.CMD_L, tokenizer.CMD_C) and self.state == _BOUNDARY:
            self.pending_locs = 1 if tok == tokenizer.CMD_L else 3
        elif tok == self.end_token and self.state in (_BOUNDARY, _SPAN_START):
            self.state = _BOUNDARY
        else:
            raise GenerationError(
                f"grammar violated: {tokenizer.token_name(tok)} illegal in state {self.state}"
            )


# --- sampling core ---


def _resolve_seed(strategy: DecodeStrategy, rng) -> int:
    if strategy.seed is not None:
        return int(strategy.seed)
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(np.iinfo(np.int64).max))
    if rng is not None:
        return int(rng)
    return int(np.random.SeedSequence().entropy % (2**63))


def _position_uniform(seed: int, position: int) -> float:
    return float(np.random.default_rng(np.random.SeedSequence([seed, position])).random())


def _pick(logits: np.ndarray, allowed: np.ndarray, strategy: DecodeStrategy, u: float) -> int:
    """Choose among `allowed` joint ids given their logits and one uniform."""
    z = logits[allowed].astype(np.float64)
    if strategy.kind == GREEDY:
        return int(allowed[int(np.argmax(z))])
    z /= strategy.temperature
    z -= z.max()
    probs = np.exp(z)
    probs /= probs.sum()
    order = np.argsort(-probs, kind="stable")
    if strategy.kind == TOP_K:
        order = order[: strategy.k]
    elif strategy.kind == NUCLEUS:
        csum = np.cumsum(probs[order])
        cut = int(np.searchsorted(csum, strategy.p, side="left")) + 1
        order = order[:cut]
    kept = probs[order]
    kept /= kept.sum()
    idx = int(np.searchsorted(np.cumsum(kept), u, side="right"))
    idx = min(idx, len(order) - 1)
    return int(allowed[order[idx]])


class _Sampler:
    """One sampling session: grammar + position-keyed draws over a
    DecodeSession."""

    def __init__(self, model, strategy, seed, grammar, end_token, position_base=0):
        self.model = model
        self.jv = model.joint
        self.strategy = strategy
        self.seed = seed
        self.grammar = grammar
        self.end_token = end_token
        self.pos = position_base
        self.raw_ids = _RAW_EOM_IDS if end_token == tokenizer.EOM else _RAW_EOS_IDS

    def draw(self, logits: np.ndarray, budget_left: int) -> int:
        """Sample one svg-local token (does not advance the session)."""
        if self.grammar is not None:
            allowed = self.grammar.legal_ids(budget_left) + self.jv.svg_base
        else:
            allowed = self.raw_ids + self.jv.svg_base
        u = _position_uniform(self.seed, self.pos)
        picked = _pick(logits, allowed, self.strategy, u)
        return picked - self.jv.svg_base

    def advance(self, svg_tok: int) -> None:
        if self.grammar is not None:
            self.grammar.feed(svg_tok)
        self.pos += 1


def _prompt_ids(model: IconModel, text: str) -> list[int]:
    """[SOS] + framed text, as joint ids."""
    text_ids = text_frontend.encode_text(text, model.text_vocab)
    return [model.joint.sos_id] + list(text_ids)


def _icon_budget(model: IconModel, strategy: DecodeStrategy, prompt_icon_len: int) -> int:
    budget = min(strategy.max_icon_tokens, model.config.icon_len) - prompt_icon_len
    if budget < 1:
        raise BudgetError(
            f"prompt occupies {prompt_icon_len} icon slots, nothing left to sample"
        )
    return budget


def _decode(tokens: list[int], strategy: DecodeStrategy) -> Icon:
    mode = tokenizer.STRICT if strategy.grammar_constrained else tokenizer.LENIENT
    try:
        return tokenizer.decode_icon(tokens, mode)
    except tokenizer.DecodeError as exc:
        raise GenerationError(f"sampled sequence not decodable: {exc}") from exc


def _run_until_end(sampler, session, logits, budget, collect_logits=None):
    """Sample until the end token or budget exhaustion; returns tokens and
    whether the end token was seen."""
    out: list[int] = []
    for k in range(budget):
        if collect_logits is not None:
            collect_logits.append(np.array(logits))
        tok = sampler.draw(logits, budget - k)
        sampler.advance(tok)
        if tok == sampler.end_token:
            return out, True
        out.append(tok)
        if k + 1 < budget:
            logits = session.step(sampler.jv.from_svg(tok))
    return out, False


def generate_tokens(
    model: IconModel,
    text: str = "",
    strategy: DecodeStrategy = DecodeStrategy(),
    rng=None,
    collect_logits: list | None = None,
) -> list[int]:
    """Sample a raw icon token sequence (without the trailing EOS)."""
    seed = _resolve_seed(strategy, rng)
    session = model.session()
    logits = session.prime(np.asarray(_prompt_ids(model, text), dtype=np.int64))
    grammar = IconGrammar(tokenizer.EOS) if strategy.grammar_constrained else None
    sampler = _Sampler(model, strategy, seed, grammar, tokenizer.EOS)
    budget = _icon_budget(model, strategy, 0)
    tokens, _ = _run_until_end(sampler, session, logits, budget, collect_logits)
    return tokens


def generate(
    model: IconModel,
    text: str = "",
    strategy: DecodeStrategy = DecodeStrategy(),
    rng=None,
) -> Icon:
    """Text-conditioned (or blank-text unconditional) icon synthesis."""
    tokens = generate_tokens(model, text, strategy, rng)
    return _decode(tokens + [tokenizer.EOS], strategy)


def fill_in_middle(
    model: IconModel,
    text: str,
    left: Icon | None,
    right: Icon | None,
    strategy: DecodeStrategy = DecodeStrategy(),
    rng=None,
) -> Icon:
    """Infill between two path contexts via the span-masked format."""
    seed = _resolve_seed(strategy, rng)
    left_toks = tokenizer.encode_icon(left)[:-1] if left is not None else []
    right_toks = tokenizer.encode_icon(right)[:-1] if right is not None else []
    prompt_icon = (
        left_toks + [tokenizer.MASK] + right_toks + [tokenizer.EOS, tokenizer.MASK]
    )
    budget = _icon_budget(model, strategy, len(prompt_icon))
    session = model.session()
    jv = model.joint
    prompt = _prompt_ids(model, text) + [jv.from_svg(t) for t in prompt_icon]
    logits = session.prime(np.asarray(prompt, dtype=np.int64))
    # constrained spans are whole paths (the training span policy), so the
    # surrounding context paths stay intact under editing
    grammar = (
        IconGrammar(tokenizer.EOM, start_state=_SPAN_START)
        if strategy.grammar_constrained
        else None
    )
    sampler = _Sampler(
        model, strategy, seed, grammar, tokenizer.EOM, position_base=len(prompt_icon)
    )
    span, terminated = _run_until_end(sampler, session, logits, budget)
    if not terminated and strategy.grammar_constrained:
        raise GenerationError("span budget exhausted before the end-of-mask token")
    full = masking.reassemble(prompt_icon + span + [tokenizer.EOM])
    return _decode(full, strategy)


def suggest_next_path(
    model: IconModel,
    text: str,
    partial: Icon | None,
    strategy: DecodeStrategy = DecodeStrategy(),
    rng=None,
) -> SvgPath | None:
    """Propose the next whole path for a partial icon; None = end-of-icon.

    Repeated suggestions (accepting each one) replay the exact token
    stream of generate() under the same seed: draws are keyed by icon
    position, and the terminator draw is re-made by the next call.
    """
    seed = _resolve_seed(strategy, rng)
    partial_toks = tokenizer.encode_icon(partial)[:-1] if partial is not None else []
    budget = _icon_budget(model, strategy, len(partial_toks))
    session = model.session()
    jv = model.joint
    prompt = _prompt_ids(model, text) + [jv.from_svg(t) for t in partial_toks]
    logits = session.prime(np.asarray(prompt, dtype=np.int64))
    grammar = None
    if strategy.grammar_constrained:
        grammar = IconGrammar(
            tokenizer.EOS, start_state=_BOUNDARY if partial_toks else _START
        )
    sampler = _Sampler(
        model, strategy, seed, grammar, tokenizer.EOS, position_base=len(partial_toks)
    )
    collected: list[int] = []
    for k in range(budget):
        tok = sampler.draw(logits, budget - k)
        if tok == tokenizer.EOS:
            if not collected:
                return None  # end-of-icon
            break  # icon would end after this path
        if tok == tokenizer.BOP and collected:
            break  # next path begins; exclude it
        sampler.advance(tok)
        if collected or tok == tokenizer.BOP:
            collected.append(tok)
        # else: continuation of the caller's last path before the next BOP;
        # consumed to keep the stream aligned but not part of the suggestion
        logits = session.step(jv.from_svg(tok))
    if not collected or collected[0] != tokenizer.BOP:
        raise GenerationError("no complete path was suggested within the budget")
    icon = _decode(collected + [tokenizer.EOS], strategy)
    return icon.paths[0]


def interpolate_generate(
    model: IconModel,
    text_a: str,
    text_b: str,
    alpha: float,
    strategy: DecodeStrategy = DecodeStrategy(),
    rng=None,
    collect_logits: list | None = None,
) -> Icon:
    """Condition on the position-wise blend of two embedded prompts."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    seed = _resolve_seed(strategy, rng)
    tr = model.transformer
    ids_a = np.asarray(_prompt_ids(model, text_a), dtype=np.int64)
    ids_b = np.asarray(_prompt_ids(model, text_b), dtype=np.int64)
    positions = np.arange(len(ids_a))
    emb_a, _ = tr.embed_ids(ids_a, positions)
    emb_b, _ = tr.embed_ids(ids_b, positions)
    blended = (1.0 - alpha) * emb_a + alpha * emb_b
    session = model.session()
    logits = session.prime_embedded(blended.astype(tr.cfg.np_dtype))
    grammar = IconGrammar(tokenizer.EOS) if strategy.grammar_constrained else None
    sampler = _Sampler(model, strategy, seed, grammar, tokenizer.EOS)
    budget = _icon_budget(model, strategy, 0)
    tokens, _ = _run_until_end(sampler, session, logits, budget, collect_logits)
    return _decode(tokens + [tokenizer.EOS], strategy)
