//! HTTP API over a directory of projects.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use reqcad_core::network::Conflict;
use reqcad_core::network::NetworkExport;
use reqcad_core::pipeline::ResourceTexts;
use reqcad_core::project::{ExportKind, Project, ProjectError};
use serde::Deserialize;
use tokio::sync::RwLock;

use crate::api::{AddRequirement, AddResponse, CreateProject, ErrorBody, ProjectView, RequirementView};

/// Open projects keyed by id. Each project has its own lock, so writes to one
/// project queue up while other projects stay available.
pub struct AppState {
    root: PathBuf,
    projects: Mutex<BTreeMap<String, Arc<RwLock<Project>>>>,
}

impl AppState {
    /// Opens every project directory under `root`.
    pub fn load(root: &Path) -> Result<AppState, ProjectError> {
        std::fs::create_dir_all(root)?;
        let mut projects = BTreeMap::new();
        for entry in std::fs::read_dir(root)? {
            let path = entry?.path();
            if path.join("project.json").is_file() {
                let p = Project::open(&path)?;
                projects.insert(p.meta.id.clone(), Arc::new(RwLock::new(p)));
            }
        }
        Ok(AppState { root: root.to_path_buf(), projects: Mutex::new(projects) })
    }

    fn get(&self, id: &str) -> Result<Arc<RwLock<Project>>, ApiError> {
        self.projects
            .lock()
            .expect("registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no project `{id}`")))
    }

    fn create(&self, name: &str, texts: ResourceTexts) -> Result<Arc<RwLock<Project>>, ApiError> {
        let mut projects = self.projects.lock().expect("registry lock");
        let n = (1..).find(|n| !projects.contains_key(&format!("p{n}")) && !self.root.join(format!("p{n}")).exists()).expect("unbounded");
        let id = format!("p{n}");
        let p = Project::create(&self.root.join(&id), &id, name, texts)?;
        let p = Arc::new(RwLock::new(p));
        projects.insert(id, p.clone());
        Ok(p)
    }
}

pub struct ApiError(pub StatusCode, pub String);

impl From<ProjectError> for ApiError {
    fn from(e: ProjectError) -> Self {
        let code = match &e {
            ProjectError::UnknownRequirement(_) | ProjectError::NothingToExport(_) => StatusCode::NOT_FOUND,
            ProjectError::AlreadyRemoved(_) | ProjectError::AlreadyExists(_) => StatusCode::CONFLICT,
            ProjectError::UnknownExportKind(_) => StatusCode::BAD_REQUEST,
            ProjectError::Resource(_) | ProjectError::Cad(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ProjectError::Io(_) | ProjectError::Json { .. } | ProjectError::NotAProject(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        ApiError(code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/projects", post(create_project))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/requirements", post(add_requirement))
        .route("/projects/{id}/requirements/{rid}", get(get_requirement).delete(remove_requirement))
        .route("/projects/{id}/network", get(get_network))
        .route("/projects/{id}/conflicts", get(get_conflicts))
        .route("/projects/{id}/export", get(export))
        .with_state(state)
}

pub async fn serve(root: &Path, port: u16) -> anyhow::Result<()> {
    let state = Arc::new(AppState::load(root)?);
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}

async fn create_project(
    State(state): State<Shared>,
    Json(body): Json<CreateProject>,
) -> Result<(StatusCode, Json<ProjectView>), ApiError> {
    if body.name.trim().is_empty() {
        return Err(ApiError(StatusCode::BAD_REQUEST, "project name is empty".into()));
    }
    let texts = body.resources.unwrap_or_else(ResourceTexts::fixture);
    let p = state.create(&body.name, texts)?;
    let view = ProjectView::of(&*p.read().await);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_project(State(state): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<ProjectView>, ApiError> {
    let p = state.get(&id)?;
    let view = ProjectView::of(&*p.read().await);
    Ok(Json(view))
}

async fn add_requirement(
    State(state): State<Shared>,
    UrlPath(id): UrlPath<String>,
    Json(body): Json<AddRequirement>,
) -> Result<(StatusCode, Json<AddResponse>), ApiError> {
    if body.text.trim().is_empty() {
        return Err(ApiError(StatusCode::BAD_REQUEST, "requirement text is empty".into()));
    }
    let p = state.get(&id)?;
    let mut p = p.write().await;
    let added = p.add_requirement(&body.text)?;
    Ok((
        StatusCode::CREATED,
        Json(AddResponse {
            requirement: RequirementView::of(&added.requirement),
            network: p.network().export(),
            new_conflicts: added.new_conflicts,
        }),
    ))
}

async fn get_requirement(
    State(state): State<Shared>,
    UrlPath((id, rid)): UrlPath<(String, String)>,
) -> Result<Json<RequirementView>, ApiError> {
    let p = state.get(&id)?;
    let p = p.read().await;
    let r = p.requirement(&rid).ok_or_else(|| ProjectError::UnknownRequirement(rid.clone()))?;
    Ok(Json(RequirementView::of(r)))
}

async fn remove_requirement(
    State(state): State<Shared>,
    UrlPath((id, rid)): UrlPath<(String, String)>,
) -> Result<Json<ProjectView>, ApiError> {
    let p = state.get(&id)?;
    let mut p = p.write().await;
    p.remove_requirement(&rid)?;
    Ok(Json(ProjectView::of(&p)))
}

async fn get_network(State(state): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<NetworkExport>, ApiError> {
    let p = state.get(&id)?;
    let export = p.read().await.network().export();
    Ok(Json(export))
}

async fn get_conflicts(State(state): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<Vec<Conflict>>, ApiError> {
    let p = state.get(&id)?;
    let conflicts = p.read().await.conflicts().to_vec();
    Ok(Json(conflicts))
}

#[derive(Deserialize)]
struct ExportQuery {
    kind: String,
    #[serde(default)]
    ascii: bool,
}

async fn export(
    State(state): State<Shared>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let kind: ExportKind = q.kind.parse()?;
    let p = state.get(&id)?;
    let text = p.read().await.export(kind, q.ascii)?;
    let content_type = match kind {
        ExportKind::Bom | ExportKind::Network => "application/json",
        _ => "text/plain; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], text).into_response())
}
