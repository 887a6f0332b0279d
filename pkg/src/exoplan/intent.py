"""Command-intent extraction from transcripts, plus WER/IER evaluation metrics.

The acoustic front-end is out of scope: parsing starts from text transcripts,
so any recognizer that produces text can be attached upstream.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class Intent(enum.Enum):
    STAND = "stand"
    SIT = "sit"
    WALK = "walk"
    STOP = "stop"
    SPEED_UP = "speed_up"
    SLOW_DOWN = "slow_down"
    MAINTAIN = "maintain"


#: Token that must be present before any utterance is acted on.
GATE_WORD = "robot"

#: Trigger phrases grouped onto the seven intents.
VOCABULARY: dict[str, Intent] = {
    "stand up": Intent.STAND,
    "stand": Intent.STAND,
    "sit down": Intent.SIT,
    "sit": Intent.SIT,
    "walk forward": Intent.WALK,
    "walk": Intent.WALK,
    "move forward": Intent.WALK,
    "move": Intent.WALK,
    "forward": Intent.WALK,
    "stop moving": Intent.STOP,
    "stop": Intent.STOP,
    "speed up": Intent.SPEED_UP,
    "go faster": Intent.SPEED_UP,
    "faster": Intent.SPEED_UP,
    "slow down": Intent.SLOW_DOWN,
    "slow": Intent.SLOW_DOWN,
    "keep moving": Intent.MAINTAIN,
    "don't change": Intent.MAINTAIN,
    "maintain speed": Intent.MAINTAIN,
}

#: Safety-first precedence used to break exact score ties between intents.
TIE_ORDER: tuple[Intent, ...] = (
    Intent.STOP,
    Intent.SIT,
    Intent.STAND,
    Intent.SLOW_DOWN,
    Intent.SPEED_UP,
    Intent.WALK,
    Intent.MAINTAIN,
)

#: Minimum keyword-overlap score; 1.0 means every phrase token must appear.
SCORE_THRESHOLD = 1.0

_ALIASES = {
    "stand": Intent.STAND,
    "sit": Intent.SIT,
    "walk": Intent.WALK,
    "stop": Intent.STOP,
    "speed_up": Intent.SPEED_UP,
    "speedup": Intent.SPEED_UP,
    "slow_down": Intent.SLOW_DOWN,
    "slowdown": Intent.SLOW_DOWN,
    "maintain": Intent.MAINTAIN,
}


@dataclass(frozen=True)
class Utterance:
    """One transcript line with its arrival time in ms since engine start."""

    text: str
    timestamp_ms: int = 0


@dataclass
class Trial:
    """One recorded recognition trial: what was said vs. what was heard."""

    target_text: str
    hypothesis_text: str
    target_intent: Intent | None
    parsed_intent: Intent | None = None


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation at token edges.

    Apostrophes survive inside tokens so "don't" stays one word.
    """
    tokens = []
    for raw in text.lower().split():
        tok = re.sub(r"[^a-z0-9']+", "", raw).strip("'")
        if tok:
            tokens.append(tok)
    return tokens


def intent_from_name(name: str) -> Intent | None:
    """Resolve an intent by its canonical or spaced/underscored name."""
    return _ALIASES.get(name.strip().lower().replace(" ", "_").replace("-", "_"))


def parse(
    utterance: Utterance | str,
    vocabulary: Mapping[str, Intent] = VOCABULARY,
) -> Intent | None:
    """Map an utterance onto an intent, or None when nothing matches.

    The gate word must appear or the utterance is ignored outright. Each
    vocabulary phrase is scored by the fraction of its tokens present in the
    utterance; only full matches (score 1.0) qualify. Ties go to the longest
    phrase, then to the safety-first intent order.
    """
    text = utterance.text if isinstance(utterance, Utterance) else utterance
    tokens = tokenize(text)
    if not tokens:
        raise ValueError("cannot parse an empty utterance")
    token_set = set(tokens)
    if GATE_WORD not in token_set:
        return None

    best: tuple[float, int, int] | None = None
    best_intent: Intent | None = None
    for phrase, intent in vocabulary.items():
        phrase_tokens = tokenize(phrase)
        score = len(set(phrase_tokens) & token_set) / len(phrase_tokens)
        if score < SCORE_THRESHOLD:
            continue
        key = (score, len(phrase_tokens), -TIE_ORDER.index(intent))
        if best is None or key > best:
            best = key
            best_intent = intent
    return best_intent


def edit_distance(target: Sequence[str], hypothesis: Sequence[str]) -> int:
    """Minimum word-level edit distance (unit insert/delete/substitute costs)."""
    n, m = len(target), len(hypothesis)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        for j in range(1, m + 1):
            sub = prev[j - 1] + (target[i - 1] != hypothesis[j - 1])
            cur[j] = min(sub, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[m]


def word_error_rate(target: Sequence[str], hypothesis: Sequence[str]) -> float:
    """WER in percent: (insertions + substitutions + deletions) / N * 100.

    The edit counts come from a minimum word-level alignment; N is the number
    of target words, so the rate exceeds 100% only through insertions.
    """
    if len(target) == 0:
        raise ValueError("WER is undefined for an empty target")
    return edit_distance(target, hypothesis) / len(target) * 100.0


def intent_error_rate(trials: Sequence[Trial]) -> float:
    """Percentage of trials whose parsed intent differs from the target intent."""
    if len(trials) == 0:
        raise ValueError("IER is undefined for an empty trial list")
    wrong = sum(1 for tr in trials if tr.parsed_intent != tr.target_intent)
    return wrong / len(trials) * 100.0


def load_corpus(path: str | Path) -> tuple[list[Trial], list[tuple[int, str]]]:
    """Read a tab-separated trial corpus.

    Each line is `target_text<TAB>hypothesis_text<TAB>target_intent` with "-"
    standing for no intent. Returns the well-formed trials and a list of
    (line_number, reason) entries for lines that could not be used.
    """
    trials: list[Trial] = []
    errors: list[tuple[int, str]] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            errors.append((lineno, f"expected 3 tab-separated fields, got {len(fields)}"))
            continue
        target_text, hypothesis_text, intent_name = (f.strip() for f in fields)
        if not tokenize(target_text):
            errors.append((lineno, "target text has no words"))
            continue
        if intent_name == "-":
            target_intent = None
        else:
            target_intent = intent_from_name(intent_name)
            if target_intent is None:
                errors.append((lineno, f"unknown intent name {intent_name!r}"))
                continue
        trials.append(Trial(target_text, hypothesis_text, target_intent))
    return trials, errors


def evaluate_trials(trials: Iterable[Trial]) -> dict:
    """Parse every hypothesis, then aggregate per-trial WER and overall IER."""
    evaluated = []
    for tr in trials:
        hyp_tokens = tokenize(tr.hypothesis_text)
        parsed = parse(tr.hypothesis_text) if hyp_tokens else None
        tr.parsed_intent = parsed
        wer = word_error_rate(tokenize(tr.target_text), hyp_tokens)
        evaluated.append(
            {
                "target": tr.target_text,
                "hypothesis": tr.hypothesis_text,
                "target_intent": tr.target_intent.value if tr.target_intent else None,
                "parsed_intent": parsed.value if parsed else None,
                "wer_percent": wer,
                "intent_correct": parsed == tr.target_intent,
            }
        )
    trials = list(trials)
    return {
        "trials": evaluated,
        "wer_percent": sum(t["wer_percent"] for t in evaluated) / len(evaluated),
        "ier_percent": intent_error_rate(trials),
        "trial_count": len(evaluated),
    }
