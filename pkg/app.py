from flask import Flask
from flask_cors import CORS
from cli import annotate_cmd, evaluate, generate, render, split
from routes.flows_routes import flows_bp
from routes.metrics_routes import metrics_bp
from routes.synth_routes import synth_bp
from routes.render_routes import render_bp
from routes.harness_routes import harness_bp
from utils.logger import configure_logging
import os

configure_logging()

app = Flask(__name__)
CORS(app, resources={r"/*": {"origins": "*"}})

# Register blueprints
app.register_blueprint(flows_bp)
app.register_blueprint(metrics_bp)
app.register_blueprint(synth_bp)
app.register_blueprint(render_bp)
app.register_blueprint(harness_bp)

# `flask generate ...`, `flask evaluate ...` etc.
for command in (generate, split, annotate_cmd, render, evaluate):
    app.cli.add_command(command)

@app.route("/")
def home():
    return "Flow toolkit API is running"

if __name__ == "__main__":
    port = int(os.environ.get("PORT", 5000))
    app.run(host="0.0.0.0", port=port)
