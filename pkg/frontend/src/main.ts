import { ApiClient } from './api.js';
import { ExplorerApp } from './app.js';

const API_BASE =
  new URLSearchParams(window.location.search).get('api') ?? '';

window.addEventListener('DOMContentLoaded', () => {
  const root = document.getElementById('app');
  if (!root) {
    throw new Error('missing #app container');
  }
  const app = new ExplorerApp(root, new ApiClient(API_BASE));
  void app.start();
});
