package com.jacapps.wilfm.service;

import android.app.IntentService;
import android.content.Intent;
import android.net.Uri;
import android.util.Log;
import androidx.localbroadcastmanager.content.LocalBroadcastManager;
import com.jacapps.wilfm.twitter.TwitterClient;
import com.jacapps.wilfm.twitter.TwitterException;
import java.io.File;

public class TweetUploadService extends IntentService {
    private static final String TAG = "TweetUploadService";
    public static final String UPLOAD_SUCCESS = "com.jacapps.wilfm.UPLOAD_SUCCESS";
    public static final String UPLOAD_FAILURE = "com.jacapps.wilfm.UPLOAD_FAILURE";
    public static final String EXTRA_TWEET_TEXT = "tweet_text";
    public static final String EXTRA_MEDIA_URI = "media_uri";
    public static final String EXTRA_RETRY_INTENT = "retry_intent";
    private static final int MAX_LENGTH = 280;

    private TwitterClient client;

    public TweetUploadService() {
        super("TweetUploadService");
    }

    @Override
    public void onCreate() {
        super.onCreate();
        client = TwitterClient.getInstance(this);
    }

    private String trimText(String text) {
        if (text == null) {
            return "";
        }
        if (text.length() > MAX_LENGTH) {
            return text.substring(0, MAX_LENGTH);
        }
        return text;
    }

    private File resolveMedia(Uri uri) {
        if (uri == null) {
            return null;
        }
        String path = uri.getPath();
        if (path == null) {
            return null;
        }
        return new File(path);
    }
    @Override
    public void onDestroy() {
        if (client != null) {
            client.close();
            client = null;
        }
        super.onDestroy();
    }

    private boolean isRetryable(TwitterException error) {
        int code = error.getStatusCode();
        if (code == 429) {
            return true;
        }
        return code >= 500 && code < 600;
    }

    private long backoffMillis(int attempt) {
        long delay = 1000L;
        for (int i = 0; i < attempt; i++) {
            delay = delay * 2;
        }
        return Math.min(delay, 60000L);
    }

    private String describeMedia(File media) {
        if (media == null) {
            return "no media";
        }
        StringBuilder builder = new StringBuilder();
        builder.append(media.getName());
        builder.append(" (");
        builder.append(media.length());
        builder.append(" bytes)");
        return builder.toString();
    }

    public static Intent createUploadIntent(android.content.Context context, String text, Uri media) {
        Intent upload = new Intent(context, TweetUploadService.class);
        upload.putExtra(EXTRA_TWEET_TEXT, text);
        upload.putExtra(EXTRA_MEDIA_URI, media);
        return upload;
    }

    private void logUpload(String text) {
        Log.v(TAG, text);
    }


    @Override
    protected void onHandleIntent(Intent intent) {
        String text = trimText(intent.getStringExtra(EXTRA_TWEET_TEXT));
        Uri mediaUri = intent.getParcelableExtra(EXTRA_MEDIA_URI);
        File media = resolveMedia(mediaUri);
        Log.d(TAG, "uploading tweet of length " + text.length());
        Intent intent2 = new Intent(this, TweetUploadService.class);
        intent2.putExtra(EXTRA_TWEET_TEXT, text);
        intent2.putExtra(EXTRA_MEDIA_URI, mediaUri);
        try {
            if (media != null) {
                long mediaId = client.uploadMedia(media);
                client.updateStatus(text, mediaId);
            } else {
                client.updateStatus(text);
            }
            Log.i(TAG, "tweet uploaded");
            Intent success = new Intent(UPLOAD_SUCCESS);
            success.setPackage(getPackageName());
            LocalBroadcastManager.getInstance(this).sendBroadcast(success);
            return;
        } catch (TwitterException e) {
            Log.e(TAG, "tweet upload failed", e);
        }
        Intent intent3 = new Intent(UPLOAD_FAILURE);
        intent3.putExtra(EXTRA_RETRY_INTENT, intent2);
        intent3.setPackage(getApplicationContext().getPackageName());
        sendBroadcast(intent3);
    }
}
