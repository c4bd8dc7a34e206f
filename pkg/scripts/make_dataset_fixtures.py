#!/usr/bin/env python3
"""Regenerate the dataset fixtures under tests/fixtures/.

Deterministic by construction (no RNG): rerunning this script reproduces the
committed files byte for byte. The label balances are part of the test
contract (the QA benchmark fixture loads 23 hallucinated / 27 factual), so
do not change the counts without updating the tests.
"""

from __future__ import annotations

import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

COUNTRIES = [
    ("France", "Paris", "Europe", "euro"),
    ("Japan", "Tokyo", "Asia", "yen"),
    ("Brazil", "Brasilia", "South America", "real"),
    ("Canada", "Ottawa", "North America", "Canadian dollar"),
    ("Egypt", "Cairo", "Africa", "Egyptian pound"),
    ("Australia", "Canberra", "Oceania", "Australian dollar"),
    ("Norway", "Oslo", "Europe", "krone"),
    ("Kenya", "Nairobi", "Africa", "Kenyan shilling"),
    ("Peru", "Lima", "South America", "sol"),
    ("Thailand", "Bangkok", "Asia", "baht"),
    ("Portugal", "Lisbon", "Europe", "euro"),
    ("Mexico", "Mexico City", "North America", "peso"),
    ("Vietnam", "Hanoi", "Asia", "dong"),
    ("Morocco", "Rabat", "Africa", "dirham"),
    ("Chile", "Santiago", "South America", "Chilean peso"),
    ("Finland", "Helsinki", "Europe", "euro"),
    ("Mongolia", "Ulaanbaatar", "Asia", "tugrik"),
    ("Ghana", "Accra", "Africa", "cedi"),
    ("Uruguay", "Montevideo", "South America", "Uruguayan peso"),
    ("Austria", "Vienna", "Europe", "euro"),
    ("Nepal", "Kathmandu", "Asia", "Nepalese rupee"),
    ("Tunisia", "Tunis", "Africa", "Tunisian dinar"),
    ("Bolivia", "Sucre", "South America", "boliviano"),
    ("Ireland", "Dublin", "Europe", "euro"),
    ("Laos", "Vientiane", "Asia", "kip"),
]

FILMS = [
    ("Jaws", "Steven Spielberg", 1975),
    ("Alien", "Ridley Scott", 1979),
    ("Goodfellas", "Martin Scorsese", 1990),
    ("Fargo", "Joel Coen", 1996),
    ("Amelie", "Jean-Pierre Jeunet", 2001),
    ("Spirited Away", "Hayao Miyazaki", 2001),
    ("Oldboy", "Park Chan-wook", 2003),
    ("Inception", "Christopher Nolan", 2010),
    ("Parasite", "Bong Joon-ho", 2019),
    ("Vertigo", "Alfred Hitchcock", 1958),
    ("Metropolis", "Fritz Lang", 1927),
    ("Rashomon", "Akira Kurosawa", 1950),
    ("Breathless", "Jean-Luc Godard", 1960),
    ("Chinatown", "Roman Polanski", 1974),
    ("Blade Runner", "Ridley Scott", 1982),
    ("The Piano", "Jane Campion", 1993),
    ("Heat", "Michael Mann", 1995),
    ("Gattaca", "Andrew Niccol", 1997),
    ("Magnolia", "Paul Thomas Anderson", 1999),
    ("Memento", "Christopher Nolan", 2000),
    ("City of God", "Fernando Meirelles", 2002),
    ("Sideways", "Alexander Payne", 2004),
    ("Caché", "Michael Haneke", 2005),
    ("Zodiac", "David Fincher", 2007),
    ("Moon", "Duncan Jones", 2009),
    ("Melancholia", "Lars von Trier", 2011),
    ("Her", "Spike Jonze", 2013),
    ("Whiplash", "Damien Chazelle", 2014),
    ("Arrival", "Denis Villeneuve", 2016),
    ("Roma", "Alfonso Cuarón", 2018),
]

DIALOGUE_TEMPLATES = [
    "{title} was directed by {director}. Have you seen it?",
    "If I remember right, {director} directed {title}.",
    "{title} is a {director} film. It holds up really well!",
    "You should watch {title}, the one {director} made.",
    "{title} came from {director}. Such a distinctive style, right?",
]

SUMM_TOPICS = [
    (
        "The city council approved the riverfront park proposal on Tuesday. "
        "Construction is scheduled to begin next spring and last eighteen months. "
        "The project will be funded through a mix of municipal bonds and state grants. "
        "Two public hearings were held before the vote.",
        "The council approved the riverfront park, with construction starting next spring.",
        "The council rejected the riverfront park after two public hearings.",
    ),
    (
        "Researchers tracked forty tagged sea turtles across the Pacific for three years. "
        "The turtles followed seasonal currents to feeding grounds near Baja California. "
        "Juveniles traveled significantly farther than adults on average. "
        "The team published their routes in an open data archive.",
        "A three-year study tracked forty sea turtles migrating to feeding grounds near Baja California.",
        "A three-year study found that adult turtles traveled farther than juveniles.",
    ),
    (
        "The museum restored a seventeenth-century tapestry over fourteen months. "
        "Conservators removed earlier repairs that had distorted the weave. "
        "The restored piece returns to public display in March. "
        "Admission to the exhibit is free on weekdays.",
        "After a fourteen-month restoration, the tapestry returns to display in March.",
        "After a fourteen-month restoration, the tapestry was sold to a private collector.",
    ),
    (
        "The regional rail operator added four early-morning departures this quarter. "
        "Ridership on the corridor grew nine percent year over year. "
        "A new ticketing app launched alongside the schedule change. "
        "Officials credited the growth to reliability improvements.",
        "The operator added four early departures as corridor ridership grew nine percent.",
        "The operator cut four early departures as corridor ridership fell nine percent.",
    ),
    (
        "Volunteers planted twelve thousand native seedlings along the burned ridge. "
        "The effort focused on oak and madrone to stabilize the slope. "
        "Organizers expect the canopy to recover within two decades. "
        "A follow-up survey is planned for autumn.",
        "Volunteers planted twelve thousand oak and madrone seedlings to stabilize the burned ridge.",
        "Volunteers planted twelve thousand pine seedlings to reseed the valley floor.",
    ),
]

# Sentence list for the segmentation corpus: 50 hand-segmented sentences
# covering honorific and Latin abbreviations, decimals, quotes, questions,
# and exclamations.
CORPUS_SENTENCES = [
    "Dr. Lee arrived at the clinic before dawn.",
    "The committee heard testimony from Prof. Okafor and Ms. Ruiz.",
    "Did the shipment reach St. Louis on time?",
    "No. 7 was retired by the club in 1989.",
    "The sample weighed 3.14 grams after drying.",
    "Mr. and Mrs. Calloway donated the east wing.",
    "What a remarkable turn of events!",
    "The figure appears in Fig. 4 of the appendix.",
    "Water boils at 100 degrees Celsius at sea level.",
    "The treaty was signed in 1648.",
    "Please see Eq. 2 for the full derivation.",
    "The orchestra tuned quietly before the performance.",
    "He cited Smith et al. in the footnotes.",
    "Some staples, e.g. rice and beans, store well.",
    "The firm was founded by Acme Inc. in 1902.",
    "The U.S. Census Bureau releases data every decade.",
    "Mt. Rainier dominates the skyline south of Seattle.",
    "The sign read \"Keep out.\"",
    "Could the results be replicated elsewhere?",
    "The bridge opened in Oct. 1931 after nine years of work.",
    "Visibility dropped below 200 meters within minutes.",
    "The archivist found letters from Gen. Moreau himself.",
    "Budget estimates rose to approx. 12 million dollars.",
    "Stop right there!",
    "The species was described by Linnaeus in 1758.",
    "Rainfall in the valley averages 48 centimeters per year.",
    "Sen. Albright chaired the hearing on water rights.",
    "How many moons does Neptune have?",
    "Neptune has at least sixteen known moons.",
    "The manuscript, cf. the 1897 facsimile, omits two stanzas.",
    "Trains to Washington, D.C. depart hourly.",
    "The index fell 2.3 percent on Friday.",
    "Interest in the dig surged after the Dec. 2019 lecture.",
    "She quoted the line verbatim!",
    "The harbor froze solid in Jan. 1895.",
    "Which route avoids the toll road?",
    "The ferry crossing takes i.e. roughly forty minutes in calm weather.",
    "The patent, cf. No. 482199, expired decades ago.",
    "Estimates vs. actual spending diverged sharply.",
    "The chapel dates to the 12th century.",
    "A sudden gust capsized the dinghy!",
    "The lab moved to the Dept. of Chemistry building in 2004.",
    "Was the witness ever cross-examined?",
    "The satellite completed 16 orbits per day.",
    "Sept. storms delayed the harvest twice.",
    "The museum acquired the seascape in 1967.",
    "The vase was est. at two million dollars.",
    "Ken Griffey Jr. hit his 500th home run in 2004.",
    "Do glaciers ever advance in summer?",
    "The expedition returned on Aug. 9 with full journals.",
]

CORPUS_SEPARATORS = [" ", "  ", "\n", " ", "\n\n"]


def write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {len(records):4d} records -> {path}")


def factool_qa() -> list[dict]:
    """50 annotated QA records: 23 hallucinated, 27 factual."""
    records = []
    for i, (country, capital, continent, currency) in enumerate(COUNTRIES):
        question = f"What is the capital of {country}, and what do you know about the country?"
        other_capital = COUNTRIES[(i + 7) % len(COUNTRIES)][1]
        true_claims = [
            (f"The capital of {country} is {capital}.", True),
            (f"{country} is located in {continent}.", True),
            (f"The currency of {country} is the {currency}.", True),
        ]
        factual_response = " ".join(text for text, _ in true_claims)
        records.append(
            {
                "prompt": question,
                "response": factual_response,
                "response_label": True,
                "claims": [{"claim": text, "label": label} for text, label in true_claims],
            }
        )
        bad_claims = [
            (f"The capital of {country} is {other_capital}.", False),
            (f"{country} is located in {continent}.", True),
            (f"The currency of {country} is the {currency}.", True),
        ]
        hallucinated_response = " ".join(text for text, _ in bad_claims)
        records.append(
            {
                "prompt": question,
                "response": hallucinated_response,
                "response_label": False,
                "claims": [{"claim": text, "label": label} for text, label in bad_claims],
            }
        )
    # 25 factual + 25 hallucinated so far; flip two hallucinated records to
    # reach the contract balance of 23 hallucinated / 27 factual.
    flipped = 0
    for record in records:
        if flipped == 2:
            break
        if not record["response_label"]:
            record["response_label"] = True
            record["claims"] = [{"claim": c["claim"], "label": True} for c in record["claims"]]
            flipped += 1
    assert sum(1 for r in records if not r["response_label"]) == 23
    return records


def halueval_qa() -> list[dict]:
    """40 QA records with short answers: 20 hallucinated, 20 factual."""
    questions = [
        "What is the capital of {country}?",
        "Which city serves as the capital of {country}?",
    ]
    records = []
    for i in range(40):
        country, capital, _, currency = COUNTRIES[i % len(COUNTRIES)]
        knowledge = (
            f"The capital of {country} is {capital}. "
            f"{country} uses the {currency} as its currency."
        )
        wrong_capital = COUNTRIES[(i + 3) % len(COUNTRIES)][1]
        hallucinated = i % 2 == 0
        records.append(
            {
                "knowledge": knowledge,
                "question": questions[i // len(COUNTRIES)].format(country=country),
                "answer": wrong_capital if hallucinated else capital,
                "hallucination": "yes" if hallucinated else "no",
            }
        )
    assert sum(1 for r in records if r["hallucination"] == "yes") == 20
    return records


def halueval_dialogue() -> list[dict]:
    """150 dialogue records: 80 hallucinated, 70 factual."""
    records = []
    index = 0
    for round_no in range(5):
        for title, director, year in FILMS:
            template = DIALOGUE_TEMPLATES[round_no]
            hallucinated = index < 80
            shown_director = (
                FILMS[(FILMS.index((title, director, year)) + 11) % len(FILMS)][1]
                if hallucinated
                else director
            )
            records.append(
                {
                    "knowledge": f"{title} was directed by {director} and released in {year}.",
                    "dialogue_history": (
                        "[Human]: Can you recommend a movie for tonight? "
                        f"[Assistant]: You could try {title}. [Human]: Who directed that one?"
                    ),
                    "response": template.format(title=title, director=shown_director),
                    "hallucination": "yes" if hallucinated else "no",
                }
            )
            index += 1
    assert sum(1 for r in records if r["hallucination"] == "yes") == 80
    return records


def halueval_summarization() -> list[dict]:
    """10 summarization records: 5 hallucinated, 5 factual."""
    records = []
    for document, good_summary, bad_summary in SUMM_TOPICS:
        records.append({"document": document, "summary": good_summary, "hallucination": "no"})
        records.append({"document": document, "summary": bad_summary, "hallucination": "yes"})
    return records


def segmentation_corpus() -> dict:
    parts = []
    for i, sentence in enumerate(CORPUS_SENTENCES):
        parts.append(sentence)
        if i < len(CORPUS_SENTENCES) - 1:
            parts.append(CORPUS_SEPARATORS[i % len(CORPUS_SEPARATORS)])
    return {"document": "".join(parts), "sentences": CORPUS_SENTENCES}


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_jsonl(FIXTURES / "factool_qa.jsonl", factool_qa())
    write_jsonl(FIXTURES / "halueval_qa.jsonl", halueval_qa())
    write_jsonl(FIXTURES / "halueval_dialogue.jsonl", halueval_dialogue())
    write_jsonl(FIXTURES / "halueval_summarization.jsonl", halueval_summarization())
    corpus = segmentation_corpus()
    path = FIXTURES / "segmentation_corpus.json"
    path.write_text(json.dumps(corpus, ensure_ascii=False, indent=2) + "\n", "utf-8")
    print(f"wrote {len(corpus['sentences']):4d} sentences -> {path}")


if __name__ == "__main__":
    main()
