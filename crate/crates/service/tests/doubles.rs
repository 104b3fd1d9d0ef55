use litmini_core::embed::{EmbedProvider, HttpEmbedder};
use litmini_core::sentiment::{Classifier, HttpClassifier, LexiconClassifier, Task};
use litmini_core::summarize::{HttpLlm, Llm};
use litmini_core::{ProviderError, Registry};
use litmini_service::doubles;

async fn spawn() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(doubles::serve(listener, std::future::pending()));
    format!("http://{addr}")
}

fn texts() -> Vec<String> {
    vec![
        "Unfortunately groundwater storage declines steadily.".into(),
        "We thank the reviewers.".into(),
        "Effective flood warning improves preparedness.".into(),
    ]
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn http_providers_match_in_process() {
    let base = spawn().await;
    tokio::task::spawn_blocking(move || {
        let registry = Registry::reference();
        let entry = registry.get("PSTM_3").unwrap();
        let remote = HttpEmbedder::new(format!("{base}/embed")).embed(&entry.spec, &texts()).unwrap();
        assert_eq!(remote, entry.provider.embed(&entry.spec, &texts()).unwrap());

        let classifier = HttpClassifier::new(format!("{base}/classify"));
        for task in [Task::Emotion, Task::Polarity] {
            let remote = classifier.classify(task, &texts()).unwrap();
            assert_eq!(remote, LexiconClassifier.classify(task, &texts()).unwrap());
        }

        let llm = HttpLlm::new(format!("{base}/summarize"));
        assert_eq!(llm.complete("Please summarize.\n\nA. B.").unwrap(), "Please summarize.\n\nA. B.");
    })
    .await
    .unwrap();
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn unknown_model_is_a_provider_error() {
    let base = spawn().await;
    tokio::task::spawn_blocking(move || {
        let mut spec = Registry::reference().get("PSTM_1").unwrap().spec.clone();
        spec.abbr = "PSTM_9".into();
        let err = HttpEmbedder::new(format!("{base}/embed")).embed(&spec, &texts()).unwrap_err();
        assert!(matches!(err, ProviderError::BadResponse { .. }), "{err:?}");
    })
    .await
    .unwrap();
}
