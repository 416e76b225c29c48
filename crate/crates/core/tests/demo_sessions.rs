mod common;

use common::{brain_at, brain_with_graph, SESSION_ONE};
use dialogue_core::brain::BrainError;
use dialogue_core::{parse_aiml, BrainConfig, MatchGraph, SessionStatus, Speaker};
use std::sync::Arc;

fn config() -> BrainConfig {
    BrainConfig::default()
}

#[test]
fn opening_turn_asks_for_the_name() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, reply) = brain.start_session("u1", 1).unwrap();
    assert_eq!(state.session_id, "u1-s1");
    assert_eq!(state.status, SessionStatus::Active);
    assert!(reply.turn.text.ends_with("What is your name?"), "{}", reply.turn.text);
    assert_eq!(state.last_that, ["WHAT", "IS", "YOUR", "NAME"]);
    assert_eq!(reply.turn_index, 0);
    assert_eq!(reply.category_ids, ["session1.aiml#0"]);

    assert!(matches!(brain.start_session("u1", 2), Err(BrainError::SessionAlreadyActive(_))));
    assert!(matches!(brain.start_session("u2", 9), Err(BrainError::NoEntryCategory(9))));
    assert!(matches!(brain.start_session("../etc", 1), Err(BrainError::InvalidId(_))));
}

#[test]
fn session_one_runs_to_completion() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("rose", 1).unwrap();
    let id = state.session_id;

    let r = brain.respond(&id, SESSION_ONE[0]).unwrap();
    assert!(r.turn.text.contains("ROSE"), "{}", r.turn.text);
    assert_eq!(r.category_ids, ["session1.aiml#1"]);
    let profile = brain.profile("rose").unwrap().unwrap();
    assert_eq!(profile.explicit.get("name").map(String::as_str), Some("ROSE"));

    let r = brain.respond(&id, SESSION_ONE[1]).unwrap();
    assert!(r.turn.text.starts_with("LISBON sounds like"));
    assert_eq!(r.turn.robot.as_ref().unwrap().image.as_deref(), Some("images/face_scale.png"));

    let r = brain.respond(&id, SESSION_ONE[2]).unwrap();
    assert_eq!(r.turn.options(), ["Yes", "No"]);
    let profile = brain.profile("rose").unwrap().unwrap();
    assert_eq!(profile.implicit.get("mood").map(String::as_str), Some("12"));

    let r = brain.respond(&id, SESSION_ONE[3]).unwrap();
    assert_eq!(r.turn.robot.as_ref().unwrap().video.as_deref(), Some("music/morning_song.mp3"));
    let r = brain.respond(&id, SESSION_ONE[4]).unwrap();
    assert!(r.turn.text.contains("free time"));
    let r = brain.respond(&id, SESSION_ONE[5]).unwrap();
    assert!(r.turn.text.starts_with("READING, that sounds lovely."), "{}", r.turn.text);
    let r = brain.respond(&id, SESSION_ONE[6]).unwrap();
    assert!(r.turn.text.contains("how do you feel now?"));
    assert!(!r.turn.session_complete);

    let r = brain.respond(&id, SESSION_ONE[7]).unwrap();
    assert!(r.turn.session_complete);
    assert!(r.turn.text.starts_with("Thank you, ROSE. I noted 9."), "{}", r.turn.text);
    assert!(r.turn.text.ends_with("Goodbye!"));
    assert_eq!(brain.state(&id).unwrap().status, SessionStatus::Completed);
    assert!(matches!(brain.respond(&id, "hello"), Err(BrainError::SessionNotActive(_))));

    // Completed sessions free the user for the next one, which greets by name.
    let (_, r) = brain.start_session("rose", 2).unwrap();
    assert!(r.turn.text.starts_with("Welcome back, ROSE."), "{}", r.turn.text);

    let turns = brain.transcript(&id, 0).unwrap();
    assert_eq!(turns.len(), 1 + 2 * SESSION_ONE.len());
    for (i, t) in turns.iter().enumerate() {
        assert_eq!(t.turn_index, i as u64);
        assert_eq!(t.speaker, if i % 2 == 0 { Speaker::Robot } else { Speaker::User });
    }
}

#[test]
fn same_yes_resolves_by_context() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("ctx", 1).unwrap();
    let id = state.session_id;
    for input in &SESSION_ONE[..3] {
        brain.respond(&id, input).unwrap();
    }
    let music = brain.respond(&id, "yes").unwrap();
    let tired = brain.respond(&id, "yes").unwrap();
    assert_ne!(music.category_ids, tired.category_ids);
    assert!(music.turn.text.contains("Music can lift our mood"));
    assert!(tired.turn.text.contains("We will take it slowly today"));
}

#[test]
fn synonyms_redirect_through_srai() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("syn", 1).unwrap();
    let id = state.session_id;
    let r = brain.respond(&id, "Call me Ann").unwrap();
    assert!(r.turn.text.contains("ANN"));
    // Only the directly matched category is logged.
    assert_eq!(r.category_ids.len(), 1);
    brain.respond(&id, "Porto").unwrap();
    brain.respond(&id, "4").unwrap();
    let r = brain.respond(&id, "Sure!").unwrap();
    assert!(r.turn.text.contains("Music can lift our mood"), "{}", r.turn.text);
}

#[test]
fn reprompts_then_escalates() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, opening) = brain.start_session("lost", 1).unwrap();
    let id = state.session_id;

    let r1 = brain.respond(&id, "qwrtp zxcv").unwrap();
    assert!(!r1.turn.escalate_to_woz);
    assert!(r1.turn.text.ends_with("What is your name?"));
    assert_ne!(r1.turn.text, opening.turn.text);
    assert_eq!(brain.state(&id).unwrap().reprompt_count, 1);

    let r2 = brain.respond(&id, "bcdfg").unwrap();
    assert!(!r2.turn.escalate_to_woz);
    assert_eq!(brain.state(&id).unwrap().reprompt_count, 2);

    let r3 = brain.respond(&id, "hjklm").unwrap();
    assert!(r3.turn.escalate_to_woz);
    assert_eq!(r3.turn.text, config().holding_phrase);
    let state = brain.state(&id).unwrap();
    assert!(state.escalation_pending);
    assert!(!state.woz_active);
    assert_eq!(state.reprompt_count, 2);
    assert_eq!(state.last_that, ["WHAT", "IS", "YOUR", "NAME"]);

    // The open question is still answerable and matching clears the counters.
    let r = brain.respond(&id, "My name is Lee").unwrap();
    assert!(r.turn.text.contains("LEE"));
    let state = brain.state(&id).unwrap();
    assert_eq!(state.reprompt_count, 0);
    assert!(!state.escalation_pending);
}

#[test]
fn missing_reprompt_repeats_last_turn() {
    let doc = parse_aiml(
        "<aiml><category><pattern>SESSION 1 START</pattern><template>Hi. Ready?\
         <robot><options><option>Yes</option></options></robot></template></category>\
         <category><pattern>YES</pattern><that>READY</that><template>Go.</template></category></aiml>",
        "plain.aiml",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_with_graph(Arc::new(MatchGraph::build(&[doc])), dir.path(), config());
    let (state, asked) = brain.start_session("rep", 1).unwrap();
    let id = state.session_id;
    assert!(matches!(brain.respond(&id, "..."), Err(BrainError::EmptyInput)));
    let miss = brain.respond(&id, "pfft grr").unwrap();
    assert_eq!(miss.turn, asked.turn);
    assert!(miss.category_ids.is_empty());
    assert_eq!(brain.state(&id).unwrap().reprompt_count, 1);
    let r = brain.respond(&id, "yes").unwrap();
    assert_eq!(r.turn.text, "Go.");
}

#[test]
fn reprompt_keeps_previous_options() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("opt", 1).unwrap();
    let id = state.session_id;
    for input in &SESSION_ONE[..2] {
        brain.respond(&id, input).unwrap();
    }
    let asked = brain.respond(&id, "8").unwrap();
    let miss = brain.respond(&id, "pfft grr").unwrap();
    assert!(miss.turn.text.starts_with("Let me ask that a different way."));
    assert_eq!(miss.turn.options(), asked.turn.options());
    // Option answers are matched case-insensitively without end punctuation.
    let r = brain.respond(&id, "  YES. ").unwrap();
    assert!(r.turn.text.contains("Music can lift our mood"));
}

#[test]
fn operator_takeover_keeps_context() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("woz", 1).unwrap();
    let id = state.session_id;

    assert!(matches!(brain.woz_override(&id, "hello"), Err(BrainError::WozNotActive(_))));
    assert!(matches!(brain.woz_release(&id), Err(BrainError::WozNotActive(_))));

    brain.woz_take(&id).unwrap();
    assert!(matches!(brain.respond(&id, "My name is Pat"), Err(BrainError::WozHasControl(_))));
    let r = brain.woz_override(&id, "Let's continue.").unwrap();
    assert_eq!(r.turn.text, "Let's continue.");
    let last = brain.transcript(&id, r.turn_index).unwrap();
    assert_eq!(last.len(), 1);
    assert!(last[0].woz);
    assert_eq!(last[0].speaker, Speaker::Robot);
    assert_eq!(brain.state(&id).unwrap().last_that, ["WHAT", "IS", "YOUR", "NAME"]);

    let released = brain.woz_release(&id).unwrap();
    assert!(!released.woz_active);
    assert_eq!(released.reprompt_count, 0);
    let r = brain.respond(&id, "My name is Pat").unwrap();
    assert!(r.turn.text.contains("PAT"));
}

#[test]
fn release_resets_reprompt_count() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("esc", 1).unwrap();
    let id = state.session_id;
    for _ in 0..3 {
        brain.respond(&id, "zzz").unwrap();
    }
    assert!(brain.state(&id).unwrap().escalation_pending);
    let taken = brain.woz_take(&id).unwrap();
    assert!(taken.woz_active);
    assert!(!taken.escalation_pending);
    brain.woz_override(&id, "Sorry, I was distracted. What is your name?").unwrap();
    let released = brain.woz_release(&id).unwrap();
    assert_eq!(released.reprompt_count, 0);
    let r = brain.respond(&id, "zzz").unwrap();
    assert!(!r.turn.escalate_to_woz);
}

#[test]
fn suspend_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    assert!(matches!(brain.resume_session("nobody"), Err(BrainError::NothingToResume(_))));
    let (state, _) = brain.start_session("sus", 1).unwrap();
    let id = state.session_id;
    let asked = brain.respond(&id, "My name is Ada").unwrap();
    brain.suspend(&id).unwrap();
    assert!(matches!(brain.respond(&id, "London"), Err(BrainError::SessionNotActive(_))));
    assert!(matches!(brain.start_session("sus", 2), Err(BrainError::SessionAlreadyActive(_))));

    let (state, again) = brain.resume_session("sus").unwrap();
    assert_eq!(state.status, SessionStatus::Active);
    assert_eq!(again.turn, asked.turn);
    assert_eq!(again.turn_index, asked.turn_index + 1);
    let r = brain.respond(&id, "London").unwrap();
    assert!(r.turn.text.starts_with("LONDON"));
}

#[test]
fn restart_suspends_and_restores_predicates() {
    let dir = tempfile::tempdir().unwrap();
    let id = {
        let brain = brain_at(dir.path(), config());
        let (state, _) = brain.start_session("bob", 1).unwrap();
        brain.respond(&state.session_id, "I am Bob").unwrap();
        brain.respond(&state.session_id, "in Oslo").unwrap();
        state.session_id
    };
    let brain = brain_at(dir.path(), config());
    let state = brain.state(&id).unwrap();
    assert_eq!(state.status, SessionStatus::Suspended);
    let (_, again) = brain.resume_session("bob").unwrap();
    assert!(again.turn.text.starts_with("OSLO sounds like"));
    let profile = brain.profile("bob").unwrap().unwrap();
    assert_eq!(profile.get("NAME"), Some("BOB"));
    assert_eq!(profile.get("birthplace"), Some("OSLO"));
    for input in &SESSION_ONE[2..] {
        brain.respond(&id, input).unwrap();
    }
    assert_eq!(brain.state(&id).unwrap().status, SessionStatus::Completed);

    let brain = brain_at(dir.path(), config());
    let (_, r) = brain.start_session("bob", 2).unwrap();
    assert!(r.turn.text.starts_with("Welcome back, BOB."));
}

#[test]
fn repeated_session_numbers_get_fresh_ids() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (first, _) = brain.start_session("rep", 1).unwrap();
    for input in SESSION_ONE {
        brain.respond(&first.session_id, input).unwrap();
    }
    let (second, _) = brain.start_session("rep", 1).unwrap();
    assert_eq!(second.session_id, "rep-s1-2");
}

fn replay(dir: &std::path::Path) -> Vec<u8> {
    let brain = brain_at(dir, config());
    let (state, _) = brain.start_session("replay", 1).unwrap();
    // Misses exercise the random reprompt wording.
    let script = ["hmm", "what", "My name is Joy"]
        .into_iter()
        .chain(SESSION_ONE[1..].iter().copied());
    for input in script {
        brain.respond(&state.session_id, input).unwrap();
    }
    std::fs::read(dir.join("sessions/replay-s1.jsonl")).unwrap()
}

#[test]
fn fixed_seed_replay_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = replay(a.path());
    assert!(!first.is_empty());
    assert_eq!(first, replay(b.path()));
}

#[test]
fn multi_sentence_input_chains_context() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("multi", 1).unwrap();
    let r = brain
        .respond(&state.session_id, "My name is Eve. I was born in Rome!")
        .unwrap();
    assert_eq!(r.category_ids.len(), 2);
    assert!(r.turn.text.contains("EVE"));
    assert!(r.turn.text.contains("ROME sounds like"));
    let logged = brain.transcript(&state.session_id, r.turn_index).unwrap();
    assert_eq!(logged[0].matched_category_id.as_deref(), Some(r.category_ids.join(",").as_str()));
}

#[test]
fn logged_ids_name_real_categories() {
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_at(dir.path(), config());
    let (state, _) = brain.start_session("ids", 1).unwrap();
    for input in SESSION_ONE {
        brain.respond(&state.session_id, input).unwrap();
    }
    for turn in brain.transcript(&state.session_id, 0).unwrap() {
        match turn.speaker {
            Speaker::User => assert!(turn.matched_category_id.is_none()),
            Speaker::Robot => {
                let ids = turn.matched_category_id.expect("automaton turns log their category");
                for id in ids.split(',') {
                    assert!(brain.graph().entries().iter().any(|e| e.id.0 == id), "{id}");
                }
            }
        }
    }
}

#[test]
fn runaway_srai_is_reported() {
    let doc = parse_aiml(
        "<aiml><category><pattern>SESSION 1 START</pattern><template>Hi.</template></category>\
         <category><pattern>LOOP</pattern><template><srai>LOOP</srai></template></category></aiml>",
        "loop.aiml",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let brain = brain_with_graph(Arc::new(MatchGraph::build(&[doc])), dir.path(), config());
    let (state, _) = brain.start_session("l", 1).unwrap();
    assert!(matches!(brain.respond(&state.session_id, "loop"), Err(BrainError::SraiDepthExceeded)));
    // Nothing was persisted for the failed turn.
    assert_eq!(brain.transcript(&state.session_id, 0).unwrap().len(), 1);
}

#[test]
fn escalation_waits_for_limit_plus_one_misses() {
    for limit in 0..=3u32 {
        let dir = tempfile::tempdir().unwrap();
        let brain = brain_at(dir.path(), BrainConfig { reprompt_limit: limit, ..config() });
        let (state, _) = brain.start_session("fz", 1).unwrap();
        for miss in 1..=limit + 1 {
            let r = brain.respond(&state.session_id, "brrr").unwrap();
            assert_eq!(r.turn.escalate_to_woz, miss == limit + 1, "limit {limit} miss {miss}");
        }
    }
}
