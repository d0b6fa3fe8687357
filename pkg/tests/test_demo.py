"""Bundled demo data: deterministic regeneration and file sanity."""

from rareclass.corpus import Label, load_corpus
from rareclass.demo import (
    build_demo_corpus,
    demo_clusters_text,
    demo_lexicon_text,
    demo_names_text,
    main as demo_main,
    packaged_data_path,
    write_demo_files,
)
from rareclass.features import load_clusters
from rareclass.lexicon import load_lexicon
from rareclass.normalize import load_name_lexicon


def test_bundled_corpus_matches_generator(tmp_path):
    from rareclass.corpus import save_corpus

    regenerated = tmp_path / "demo_corpus.tsv"
    save_corpus(build_demo_corpus(), regenerated)
    assert regenerated.read_bytes() == packaged_data_path("demo_corpus.tsv").read_bytes()


def test_bundled_side_files_match_generator():
    assert demo_lexicon_text() == packaged_data_path("demo_lexicon.txt").read_text()
    assert demo_names_text() == packaged_data_path("demo_names.txt").read_text()
    assert demo_clusters_text() == packaged_data_path("demo_clusters.tsv").read_text()


def test_demo_corpus_shape():
    corpus = load_corpus(packaged_data_path("demo_corpus.tsv"))
    counts = corpus.class_counts()
    assert len(corpus) == 500
    assert counts[Label.DEFECT] == 25
    assert counts[Label.POSSIBLE_DEFECT] == 25
    assert counts[Label.NON_DEFECT] == 450
    spanned = sum(1 for item in corpus if item.match_span is not None)
    assert spanned > 450  # a few rows deliberately omit spans

    lexicon = load_lexicon(packaged_data_path("demo_lexicon.txt"))
    surfaces = set()
    for canonical, variants in lexicon.terms:
        surfaces.add(canonical.lower())
        surfaces.update(v.lower() for v in variants)
    for item in corpus:
        if item.match_span is not None:
            start, end = item.match_span
            surface = item.tweet.text.encode("utf-8")[start:end].decode("utf-8")
            assert surface.lower() in surfaces


def test_demo_side_files_load():
    assert len(load_name_lexicon(packaged_data_path("demo_names.txt")).names) >= 60
    assert len(load_clusters(packaged_data_path("demo_clusters.tsv"))) >= 10
    assert len(load_lexicon(packaged_data_path("demo_lexicon.txt"))) == 12


def test_write_demo_files_and_module_entry(tmp_path, capsys):
    written = write_demo_files(tmp_path / "demo")
    names = {p.name for p in written}
    assert names == {
        "demo_corpus.tsv", "demo_lexicon.txt", "demo_names.txt",
        "demo_clusters.tsv", "demo.cfg",
    }
    assert demo_main(["--out-dir", str(tmp_path / "demo2")]) == 0
    assert "demo_corpus.tsv" in capsys.readouterr().out
