class Repo<T> where T : Entity {
    Dictionary<string, T> items;
    T Find<K>(K key) where K : IKey {
        return items.Lookup(key);
    }
}
