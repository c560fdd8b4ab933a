import pytest

from fiblex.errors import (
    BaseMismatch,
    DiagramOutsideLanguage,
    EmptyExample,
    ExampleNotInTeacherFibre,
    FibreNotEmpty,
    UnforcedActionAtL,
)
from fiblex.fincat import (
    CatFunctor,
    SetFunctor,
    discrete_category,
    free_category,
    opposite,
    quiver_from_edges,
    validate_setfunctor,
)
from fiblex.speaker import (
    Explanation,
    Speaker,
    acquire_by_example,
    acquire_by_example_merged,
    acquire_by_paraphrasis,
    restriction_along_embedding,
    tautological_explanation,
    validate_explanation,
)


def make_speaker(name, lang, fibres, actions=None):
    base = opposite(lang)
    value = {o: frozenset(fibres.get(o, ())) for o in lang.objects}
    action = {}
    for m in lang.morphisms:
        if base.is_identity(m):
            action[m] = {x: x for x in value[base.src[m]]}
        else:
            action[m] = dict((actions or {}).get(m, {}))
    return Speaker(name=name, language=lang, meaning=SetFunctor(base, value, action))


def discrete_speaker(name, fibres):
    return make_speaker(name, discrete_category(fibres.keys()), fibres)


def evilcat_speaker(cat_fibre):
    fibres = {
        "evil": ["e1", "e2"],
        "black": ["b1"],
        "feline": ["f1", "f2"],
        "cat": cat_fibre,
    }
    return discrete_speaker("p", fibres)


def discrete_explanation(lang, target, picks):
    shape = discrete_category(picks.keys())
    diagram = CatFunctor(
        shape,
        lang,
        dict(picks),
        {shape.identity[a]: lang.identity[w] for a, w in picks.items()},
    )
    return Explanation(shape=shape, diagram=diagram, target=target)


# --- explanations ---------------------------------------------------------------


def test_tautological_explanation_is_valid_and_exact():
    speaker = discrete_speaker("p", {"cat": ["c1", "c2", "c3", "c4", "c5"], "dog": ["d"]})
    check = validate_explanation(speaker, tautological_explanation(speaker, "cat"))
    assert check.valid and check.exact and not check.vacuous
    assert len(check.limit.apex) == 5


def test_tautological_explanation_of_empty_fibre_is_vacuous_but_exact():
    speaker = discrete_speaker("p", {"cat": [], "dog": ["d"]})
    check = validate_explanation(speaker, tautological_explanation(speaker, "cat"))
    assert check.valid and check.exact and check.vacuous


def test_evilcat_explanation_apex_and_exactness():
    speaker = evilcat_speaker(["c11", "c12", "c21", "c22"])
    picks = {"a1": "evil", "a2": "black", "a3": "feline"}
    expl = discrete_explanation(speaker.language, "cat", picks)
    embedding = {
        (e, "b1", f): f"c{e[-1]}{f[-1]}"
        for e in ("e1", "e2")
        for f in ("f1", "f2")
    }
    expl = Explanation(expl.shape, expl.diagram, "cat", embedding)
    check = validate_explanation(speaker, expl)
    assert len(check.limit.apex) == 4  # 2 * 1 * 2
    assert check.valid and check.exact

    bigger = evilcat_speaker(["c11", "c12", "c21", "c22", "extra"])
    check2 = validate_explanation(bigger, Explanation(expl.shape, expl.diagram, "cat", embedding))
    assert check2.valid and not check2.exact


def test_explanation_touching_empty_fibre_is_vacuous_but_valid():
    speaker = discrete_speaker("p", {"evil": [], "cat": ["c"]})
    expl = discrete_explanation(speaker.language, "cat", {"a1": "evil"})
    check = validate_explanation(speaker, expl)
    assert check.vacuous and check.valid
    assert check.limit.apex == frozenset()


def test_explanation_outside_language_is_rejected():
    speaker = discrete_speaker("p", {"cat": ["c"]})
    other = discrete_category(["dog"])
    expl = discrete_explanation(other, "dog", {"a1": "dog"})
    with pytest.raises(DiagramOutsideLanguage):
        validate_explanation(speaker, expl)


def test_embedding_violations_are_reported():
    speaker = discrete_speaker("p", {"black": ["b1", "b2"], "cat": ["c1"]})
    expl = discrete_explanation(speaker.language, "cat", {"a1": "black"})
    bad = Explanation(expl.shape, expl.diagram, "cat", {("b1",): "c1", ("b2",): "c1"})
    check = validate_explanation(speaker, bad)
    assert not check.valid
    assert any("injective" in p for p in check.problems)


# --- acquisition by example -------------------------------------------------------


def test_look_a_cat():
    alice = discrete_speaker("alice", {"cat": ["felix", "whiskers"], "dog": ["rex"]})
    bob = discrete_speaker("bob", {"cat": [], "dog": ["fido"]})
    bob2, report = acquire_by_example(bob, "cat", ["felix"], teacher=alice, event_id="e1")
    assert bob2.fibre("cat") == frozenset(["felix"])
    assert bob2.fibre("dog") == frozenset(["fido"])
    assert report.outcome == "learned"
    assert report.fibres_before["cat"] == 0 and report.fibres_after["cat"] == 1
    # prior meanings keep their names and actions
    assert bob2.meaning.value["dog"] == bob.meaning.value["dog"]


def test_example_with_two_witnesses():
    bob = discrete_speaker("bob", {"cat": [], "dog": ["fido"]})
    bob2, _ = acquire_by_example(bob, "cat", ["s1", "s2"], event_id="e1")
    assert bob2.fibre("cat") == frozenset(["s1", "s2"])


def test_example_propagates_along_incident_morphisms():
    lang = free_category(quiver_from_edges(["X", "cat"], [("m", "X", "cat")]))
    learner = make_speaker("bob", lang, {"X": ["x0"], "cat": []})
    out, _ = acquire_by_example(learner, "cat", ["s"], event_id="e1")
    assert out.fibre("cat") == frozenset(["s"])
    # one new component per (witness, morphism into the word)
    assert len(out.fibre("X")) == 2
    assert "x0" in out.fibre("X")
    gained = sorted(out.fibre("X") - {"x0"})[0]
    assert gained.startswith("e1:")
    # the action of m reindexes the new witness onto the new component
    assert out.meaning.action["m"]["s"] == gained
    assert validate_setfunctor(out.meaning) == []


def test_example_requires_empty_fibre():
    bob = discrete_speaker("bob", {"cat": ["old"]})
    with pytest.raises(FibreNotEmpty):
        acquire_by_example(bob, "cat", ["felix"])


def test_example_requires_witnesses():
    bob = discrete_speaker("bob", {"cat": []})
    with pytest.raises(EmptyExample):
        acquire_by_example(bob, "cat", [])


def test_example_witnesses_must_come_from_teacher():
    alice = discrete_speaker("alice", {"cat": ["felix"]})
    bob = discrete_speaker("bob", {"cat": []})
    with pytest.raises(ExampleNotInTeacherFibre):
        acquire_by_example(bob, "cat", ["someone"], teacher=alice)


def brute_force_fibres(learner, word, witnesses):
    """Independent oracle: explicit comma categories plus hand-rolled
    union-find over the zigzag graph, at the generator level."""
    lang = learner.language
    fib = learner.fibration
    objects = sorted(fib.total.objects) + sorted(witnesses)
    omap = {t: fib.proj.omap[t] for t in fib.total.objects}
    omap.update({s: word for s in witnesses})
    gens = [
        (fib.total.src[m], fib.total.tgt[m], fib.proj.mmap[m])
        for m in fib.total.non_identities()
    ]
    sizes = {}
    for anchor in sorted(lang.objects):
        pairs = [
            (d, f)
            for d in objects
            for f in lang.hom(anchor, omap[d])
        ]
        parent = {p: p for p in pairs}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for d1, d2, img in gens:
            for f in lang.hom(anchor, omap[d1]):
                union((d1, f), (d2, lang.compose[(img, f)]))
        sizes[anchor] = len({find(p) for p in pairs})
    return sizes


def test_example_agrees_with_brute_force_oracle():
    lang = free_category(
        quiver_from_edges(["X", "Y", "cat"], [("m", "X", "cat"), ("n", "X", "Y")])
    )
    learner = make_speaker(
        "bob",
        lang,
        {"X": ["x0", "x1"], "Y": ["y0"], "cat": []},
        actions={"n": {"y0": "x0"}},
    )
    expected = brute_force_fibres(learner, "cat", ["s1", "s2"])
    out, _ = acquire_by_example(learner, "cat", ["s1", "s2"])
    assert {o: len(out.fibre(o)) for o in sorted(lang.objects)} == expected


# --- merged acquisition -------------------------------------------------------------


def test_merged_with_empty_fibre_matches_plain():
    bob = discrete_speaker("bob", {"cat": [], "dog": ["fido"]})
    plain, _ = acquire_by_example(bob, "cat", ["s"], event_id="e1")
    merged, _ = acquire_by_example_merged(bob, "cat", ["s"], glue={}, event_id="e1")
    assert plain == merged


def test_merged_glues_prior_meaning_onto_witness():
    bob = discrete_speaker("bob", {"cat": ["x"], "dog": ["fido"]})
    out, _ = acquire_by_example_merged(bob, "cat", ["s"], glue={"x": "s"})
    assert out.fibre("cat") == frozenset(["s"])


def test_merged_keeps_unglued_witnesses_separate():
    bob = discrete_speaker("bob", {"cat": ["x"]})
    out, _ = acquire_by_example_merged(bob, "cat", ["s", "t"], glue={"x": "s"})
    assert out.fibre("cat") == frozenset(["s", "t"])


def test_merged_respects_reindexing_along_incident_morphisms():
    lang = free_category(quiver_from_edges(["X", "cat"], [("m", "X", "cat")]))
    bob = make_speaker(
        "bob", lang, {"X": ["a"], "cat": ["x"]}, actions={"m": {"x": "a"}}
    )
    out, _ = acquire_by_example_merged(bob, "cat", ["s"], glue={"x": "s"})
    assert out.fibre("cat") == frozenset(["s"])
    assert out.fibre("X") == frozenset(["a"])
    # the glued witness inherits the old element's reindexing
    assert out.meaning.action["m"] == {"s": "a"}
    assert validate_setfunctor(out.meaning) == []


# --- paraphrasis ---------------------------------------------------------------------


def alice_and_bob():
    lang = discrete_category(["cat", "feline", "black", "cursed"])
    alice = make_speaker(
        "alice",
        lang,
        {"cat": ["cleo"], "feline": ["felix"], "black": ["nero"], "cursed": ["morgana"]},
    )
    bob = make_speaker(
        "bob",
        lang,
        {"cat": [], "feline": ["tiger", "lynx"], "black": ["noir"], "cursed": ["curse"]},
    )
    picks = {"a1": "feline", "a2": "black", "a3": "cursed"}
    expl = discrete_explanation(lang, "cat", picks)
    expl = Explanation(expl.shape, expl.diagram, "cat", {("felix", "nero", "morgana"): "cleo"})
    return alice, bob, expl


def test_paraphrasis_alice_bob():
    alice, bob, expl = alice_and_bob()
    alice_before = Speaker(alice.name, alice.language, alice.meaning)
    out, report = acquire_by_paraphrasis(alice, bob, "cat", expl, event_id="e2")

    assert report.outcome == "learned"
    assert len(out.fibre("cat")) == 2
    assert report.apex == ("(lynx,noir,curse)", "(tiger,noir,curse)")
    assert report.new_morphisms == ("cat→black", "cat→cursed", "cat→feline")
    # other fibres unchanged
    for o in ("feline", "black", "cursed"):
        assert out.fibre(o) == bob.fibre(o)
    # teacher untouched
    assert alice == alice_before

    # each new edge acts by the matching projection leg
    legs = {
        "cat→feline": {"e2:(lynx,noir,curse)": "lynx", "e2:(tiger,noir,curse)": "tiger"},
        "cat→black": {"e2:(lynx,noir,curse)": "noir", "e2:(tiger,noir,curse)": "noir"},
        "cat→cursed": {"e2:(lynx,noir,curse)": "curse", "e2:(tiger,noir,curse)": "curse"},
    }
    for name, graph in legs.items():
        assert out.meaning.action[name] == graph

    # the old language embeds name-for-name and meanings restrict on the nose
    restricted = restriction_along_embedding(out, bob.language)
    for m in bob.language.morphisms:
        if m not in ("id_cat",):
            assert restricted.action[m] == bob.meaning.action[m]
    assert len(out.language.morphisms) == len(bob.language.morphisms) + 3


def test_paraphrasis_no_sense_on_tautological_transfer():
    alice, bob, _ = alice_and_bob()
    carol = make_speaker(
        "carol",
        alice.language,
        {"cat": [], "feline": [], "black": ["noir"], "cursed": []},
    )
    taut = tautological_explanation(alice, "cat")
    out, report = acquire_by_paraphrasis(alice, carol, "cat", taut, event_id="e3")
    assert report.outcome == "no-sense"
    assert out == carol
    assert report.new_morphisms == ()


def test_paraphrasis_requires_shared_language():
    alice, bob, expl = alice_and_bob()
    stranger = discrete_speaker("s", {"cat": ["c"]})
    with pytest.raises(BaseMismatch):
        acquire_by_paraphrasis(stranger, bob, "cat", expl)


def test_paraphrasis_requires_empty_learner_fibre():
    alice, bob, expl = alice_and_bob()
    knowing = make_speaker(
        "bob",
        alice.language,
        {"cat": ["already"], "feline": ["t"], "black": ["n"], "cursed": ["c"]},
    )
    with pytest.raises(FibreNotEmpty):
        acquire_by_paraphrasis(alice, knowing, "cat", expl)


def test_paraphrasis_unforced_actions_need_overrides():
    lang = free_category(quiver_from_edges(["X", "cat", "feline"], [("m", "X", "cat")]))
    teacher = make_speaker(
        "alice",
        lang,
        {"X": ["ax"], "cat": ["cleo"], "feline": ["felix"]},
        actions={"m": {"cleo": "ax"}},
    )
    learner = make_speaker("bob", lang, {"X": ["x0"], "cat": [], "feline": ["tiger"]})
    expl = discrete_explanation(lang, "cat", {"a1": "feline"})
    expl = Explanation(expl.shape, expl.diagram, "cat", {("felix",): "cleo"})
    with pytest.raises(UnforcedActionAtL) as err:
        acquire_by_paraphrasis(teacher, learner, "cat", expl)
    assert err.value.morphisms == ("m",)

    out, _ = acquire_by_paraphrasis(
        teacher, learner, "cat", expl, edge_overrides={"m": {"(tiger)": "x0"}}, event_id="e4"
    )
    assert out.meaning.action["m"] == {"e4:(tiger)": "x0"}
    assert validate_setfunctor(out.meaning) == []


def test_paraphrasis_duplicate_targets_get_one_edge_per_leg():
    lang = discrete_category(["cat", "feline"])
    teacher = make_speaker("alice", lang, {"cat": ["cleo"], "feline": ["felix"]})
    learner = make_speaker("bob", lang, {"cat": [], "feline": ["tiger"]})
    picks = {"a1": "feline", "a2": "feline"}
    expl = discrete_explanation(lang, "cat", picks)
    expl = Explanation(expl.shape, expl.diagram, "cat", {("felix", "felix"): "cleo"})
    out, report = acquire_by_paraphrasis(teacher, learner, "cat", expl, event_id="e5")
    assert report.new_morphisms == ("cat→feline#a1", "cat→feline#a2")
    assert len(out.fibre("cat")) == 1
