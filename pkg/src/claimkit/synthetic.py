"""Seeded synthetic claim corpora for offline runs, demos, and tests.

Claims follow a biography-style template whose capitalized person and
place names satisfy the entity gate, and whose evidence passages restate
most (but deliberately not all) claim tokens so the lexical-overlap gate
passes. The generators also plant known violations of every rule gate,
near-duplicate clusters, exact copies, holdout collisions, and a band of
long-evidence records, all as a pure function of the seed.
"""

from __future__ import annotations

import random

from .corpus import ClaimRecord, Label

_FIRST = ["Alice", "Boris", "Carmen", "Dmitri", "Elena", "Farid", "Greta",
          "Hiro", "Ingrid", "Jonas", "Katya", "Liang", "Marta", "Nadia",
          "Oscar", "Priya", "Quentin", "Rosa", "Stefan", "Tamar"]
_LAST = ["Johnson", "Petrov", "Alvarez", "Nakamura", "Lindgren", "Okafor",
         "Moreau", "Kowalski", "Haddad", "Bergman", "Castillo", "Varga",
         "Okonkwo", "Silva", "Brandt", "Iyer", "Duval", "Sorensen"]
_CITY = ["Paris", "Vienna", "Kyoto", "Lagos", "Oslo", "Madrid", "Prague",
         "Istanbul", "Montreal", "Lisbon", "Helsinki", "Zagreb"]
_PROFESSION = ["physicist", "botanist", "architect", "violinist", "historian",
               "chemist", "novelist", "cartographer", "sculptor", "linguist"]
_TOPIC = ["glacier dynamics", "baroque counterpoint", "coral taxonomy",
          "medieval trade routes", "semiconductor doping", "river deltas",
          "orbital mechanics", "fermentation chemistry", "urban acoustics"]
_FILLER = ("archive records describe the period in detail and several "
           "letters from colleagues mention the relocation while local "
           "newspapers covered the arrival and university bulletins noted "
           "the appointment alongside routine announcements about lectures "
           "seminars and public demonstrations held that season").split()


def _claim_parts(rng: random.Random) -> dict:
    return {
        "first": rng.choice(_FIRST),
        "last": rng.choice(_LAST),
        "city": rng.choice(_CITY),
        "profession": rng.choice(_PROFESSION),
        "topic": rng.choice(_TOPIC),
        "year": rng.randint(1860, 1990),
    }


def _claim_text(p: dict) -> str:
    return (f"The {p['profession']} {p['first']} {p['last']} moved to "
            f"{p['city']} in {p['year']} and studied {p['topic']} there.")


def _passages(p: dict, rng: random.Random, count: int, min_tokens: int,
              omit_profession: bool = True) -> list[str]:
    """Evidence passages restating the claim; the profession word is withheld
    so claim/evidence lexical overlap stays below the 0.9 gate."""
    role = "scholar" if omit_profession else p["profession"]
    lead = (f"{p['first']} {p['last']} was a noted {role} who moved to "
            f"{p['city']} in {p['year']} and studied {p['topic']} at the "
            f"city institute.")
    passages = [lead]
    while sum(len(x.split()) for x in passages) < min_tokens or len(passages) < count:
        chunk = rng.sample(_FILLER, k=len(_FILLER))
        passages.append(" ".join(chunk) + ".")
        if len(passages) >= count and sum(len(x.split()) for x in passages) >= min_tokens:
            break
    return passages


def _record(idx: int, rng: random.Random, source: str, label: Label,
            prefix: str = "syn") -> ClaimRecord:
    p = _claim_parts(rng)
    return ClaimRecord(
        id=f"{prefix}-{idx:04d}",
        claim=_claim_text(p),
        evidence=_passages(p, rng, count=rng.randint(3, 5), min_tokens=220),
        source=source,
        label=label,
    )


def _alternating(idx: int) -> tuple[str, Label]:
    source = "alpha" if idx % 2 == 0 else "beta"
    label = Label.SUPPORTED if (idx // 2) % 2 == 0 else Label.REFUTED
    return source, label


def funnel_corpus(seed: int = 7) -> list[ClaimRecord]:
    """200 records: 150 clean, planted duplicates, one violation batch per
    rule gate, and a dozen long-evidence (>= 3000 token) records."""
    rng = random.Random(seed)
    records: list[ClaimRecord] = []

    clean: list[ClaimRecord] = []
    for i in range(150):
        source, label = _alternating(i)
        rec = _record(i, rng, source, label)
        clean.append(rec)
        records.append(rec)

    nxt = 150
    # near-duplicates: appending one word keeps shingle Jaccard >= 0.7
    for i in range(10):
        base = clean[rng.randrange(len(clean))]
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=base.claim + " Indeed.",
            evidence=list(base.evidence), source=base.source, label=base.label,
        ))
        nxt += 1
    # exact claim copies under fresh ids
    for i in range(5):
        base = clean[rng.randrange(len(clean))]
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=base.claim,
            evidence=list(base.evidence), source=base.source, label=base.label,
        ))
        nxt += 1
    # rule violations, one batch per gate
    for i in range(5):  # too few passages
        p = _claim_parts(rng)
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=_claim_text(p),
            evidence=_passages(p, rng, count=3, min_tokens=220)[:2],
            source="alpha", label=Label.SUPPORTED,
        ))
        nxt += 1
    for i in range(5):  # too short
        p = _claim_parts(rng)
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=_claim_text(p),
            evidence=[f"{p['first']} {p['last']} lived in {p['city']}.",
                      "Records are sparse.", "Little else survives."],
            source="beta", label=Label.REFUTED,
        ))
        nxt += 1
    for i in range(3):  # too long
        p = _claim_parts(rng)
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=_claim_text(p),
            evidence=_passages(p, rng, count=4, min_tokens=10500),
            source="alpha", label=Label.SUPPORTED,
        ))
        nxt += 1
    for i in range(5):  # lexical overlap 1.0: evidence quotes the claim
        p = _claim_parts(rng)
        claim = _claim_text(p)
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=claim,
            evidence=[claim] + [
                " ".join(rng.sample(_FILLER, k=len(_FILLER))) + "."
                for _ in range(6)
            ],
            source="beta", label=Label.REFUTED,
        ))
        nxt += 1
    for i in range(5):  # no capitalized entities in the claim
        p = _claim_parts(rng)
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}",
            claim=f"a {p['profession']} moved somewhere in {p['year']} and studied {p['topic']}.",
            evidence=_passages(p, rng, count=3, min_tokens=220),
            source="alpha", label=Label.SUPPORTED,
        ))
        nxt += 1
    # long-evidence band for the augmentation stage
    for i in range(12):
        source, label = _alternating(i)
        p = _claim_parts(rng)
        records.append(ClaimRecord(
            id=f"syn-{nxt:04d}", claim=_claim_text(p),
            evidence=_passages(p, rng, count=5, min_tokens=3200),
            source=source, label=label,
        ))
        nxt += 1
    assert len(records) == 200
    return records


def dedup_corpus(seed: int = 11) -> list[ClaimRecord]:
    """500 records with planted near-duplicate clusters and exact copies."""
    rng = random.Random(seed)
    records: list[ClaimRecord] = []
    base: list[ClaimRecord] = []
    for i in range(350):
        source, label = _alternating(i)
        rec = _record(i, rng, source, label, prefix="ddp")
        base.append(rec)
        records.append(rec)
    nxt = 350
    for i in range(100):
        parent = base[rng.randrange(len(base))]
        suffix = rng.choice([" Indeed.", " Reportedly.", " Apparently."])
        records.append(ClaimRecord(
            id=f"ddp-{nxt:04d}", claim=parent.claim + suffix,
            evidence=list(parent.evidence), source=parent.source, label=parent.label,
        ))
        nxt += 1
    for i in range(50):
        parent = base[rng.randrange(len(base))]
        records.append(ClaimRecord(
            id=f"ddp-{nxt:04d}", claim=parent.claim,
            evidence=list(parent.evidence), source=parent.source, label=parent.label,
        ))
        nxt += 1
    assert len(records) == 500
    return records


def holdout_corpus(train: list[ClaimRecord], seed: int = 13,
                   collisions: int = 10, fresh: int = 20) -> list[ClaimRecord]:
    """Holdout set: some claims copied verbatim from the train corpus
    (guaranteed contamination hits) plus fresh unseen claims."""
    rng = random.Random(seed)
    out: list[ClaimRecord] = []
    picks = rng.sample(range(len(train)), k=min(collisions, len(train)))
    for i, idx in enumerate(picks):
        src = train[idx]
        out.append(ClaimRecord(
            id=f"hold-{i:04d}", claim=src.claim,
            evidence=list(src.evidence), source="holdout", label=src.label,
        ))
    for i in range(fresh):
        source, label = _alternating(i)
        out.append(_record(1000 + i, rng, "holdout", label, prefix="hold"))
    return out
